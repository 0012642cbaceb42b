#pragma once

#include <stdexcept>
#include <string>

namespace cadapt {

enum class Errc {
  MagicMismatch,
  Truncated,
  PayloadMismatch,
  NotNormalized,
  NonFinite,
  DimensionError,
  ClassCountError,
  EmptyClass,
  LabelRangeError,
  GeometryError,
  ZeroVolume,
  IoError,
  InvalidArgument,
};

const char* to_string(Errc code) noexcept;

/// Exception carrying a machine-readable error code. For EmptyClass the
/// offending class index is available through class_index().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, int class_index = -1);

  Errc code() const noexcept { return code_; }
  int class_index() const noexcept { return class_index_; }

 private:
  Errc code_;
  int class_index_;
};

}  // namespace cadapt
