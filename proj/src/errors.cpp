#include "cadapt/errors.hpp"

namespace cadapt {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MagicMismatch: return "MagicMismatch";
    case Errc::Truncated: return "Truncated";
    case Errc::PayloadMismatch: return "PayloadMismatch";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::NonFinite: return "NonFinite";
    case Errc::DimensionError: return "DimensionError";
    case Errc::ClassCountError: return "ClassCountError";
    case Errc::EmptyClass: return "EmptyClass";
    case Errc::LabelRangeError: return "LabelRangeError";
    case Errc::GeometryError: return "GeometryError";
    case Errc::ZeroVolume: return "ZeroVolume";
    case Errc::IoError: return "IoError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message, int class_index)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      class_index_(class_index) {}

}  // namespace cadapt
