#include <doctest.h>

#include <cstdlib>
#include <regex>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "cadapt/volume.hpp"
#include "support.hpp"

using namespace cadapt;
using cadapt::testing::read_file;
using cadapt::testing::TempDir;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(const TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = "cd '" + dir.path().string() + "' && '" CADAPT_CLI_PATH "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

std::string value_of(const std::string& text, const std::string& key) {
  std::smatch m;
  const std::regex re("(^|\\s)" + key + "=(\\S+)");
  return std::regex_search(text, m, re) ? m[2].str() : std::string();
}

}  // namespace

TEST_CASE("phantom writes loadable files deterministically") {
  TempDir dir;
  REQUIRE(cli(dir, "phantom --means 0,5,10 --noise-std 0.5 --seed 1 --out-img t.cav --out-labels t.lab "
                   "--out-prob t.cap --out-pgm t.pgm")
              .code == 0);
  CHECK(load_volume(dir / "t.cav").dims() == Dims{128, 128});
  CHECK(load_probmap(dir / "t.cap").num_classes() == 3);
  CHECK(load_labels(dir / "t.lab").num_classes() == 3);
  CHECK(read_file(dir / "t.pgm").starts_with("P5\n128 128\n65535\n"));

  REQUIRE(cli(dir, "phantom --means 0,5,10 --noise-std 0.5 --seed 1 --out-img u.cav").code == 0);
  CHECK(read_file(dir / "t.cav") == read_file(dir / "u.cav"));
  REQUIRE(cli(dir, "phantom --means 0,5,10 --noise-std 0.5 --seed 2 --out-img v.cav").code == 0);
  CHECK(read_file(dir / "t.cav") != read_file(dir / "v.cav"));
}

TEST_CASE("usage errors exit with 2") {
  TempDir dir;
  CHECK(cli(dir, "phantom --means 0 --out-img t.cav").code == 2);
  CHECK(cli(dir, "phantom").code == 2);
  CHECK(cli(dir, "frobnicate").code == 2);
  CHECK(cli(dir, "adapt --train-img a.cav --input b.cav").code == 2);
}

TEST_CASE("missing input exits with 1 and names the path") {
  TempDir dir;
  const Run r = cli(dir, "metrics --pred nowhere.lab --truth nowhere.lab");
  CHECK(r.code == 1);
  CHECK(r.err.find("nowhere.lab") != std::string::npos);
}

TEST_CASE("malformed files exit with 4") {
  TempDir dir;
  cadapt::testing::write_file(dir / "bad.lab", "garbage!");
  CHECK(cli(dir, "metrics --pred bad.lab --truth bad.lab").code == 4);
}

TEST_CASE("metrics reports error, dice and mismatch codes") {
  TempDir dir;
  save_labels(LabelImage({2, 2}, 2, {0, 1, 1, 0}), dir / "a.lab");
  save_labels(LabelImage({2, 2}, 2, {0, 1, 1, 1}), dir / "b.lab");
  save_labels(LabelImage({1, 4}, 2, {0, 1, 1, 0}), dir / "c.lab");

  const Run same = cli(dir, "metrics --pred a.lab --truth a.lab");
  REQUIRE(same.code == 0);
  CHECK(value_of(same.out, "error") == "0");
  CHECK(value_of(same.out, "dice_0") == "1");
  CHECK(value_of(same.out, "dice_1") == "1");

  const Run one = cli(dir, "metrics --pred a.lab --truth b.lab");
  REQUIRE(one.code == 0);
  CHECK(value_of(one.out, "error") == "0.25");

  CHECK(cli(dir, "metrics --pred a.lab --truth c.lab").code == 3);
}

TEST_CASE("adapt logs iterations and converges on the centre-7 phantom") {
  TempDir dir;
  REQUIRE(cli(dir, "phantom --means 0,5,10 --seed 1 --out-img tr.cav --out-prob tr.cap").code == 0);
  REQUIRE(cli(dir, "phantom --means 0,7,10 --seed 2 --out-img te.cav").code == 0);
  const Run r = cli(dir, "adapt --train-img tr.cav --train-prob tr.cap --input te.cav --out-labels a.lab "
                         "--add-noise-std 0.5 --seed 3");
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::size_t iterations = 0;
  double last_centre = 0.0;
  while (std::getline(lines, line)) {
    if (!line.starts_with("iter=")) continue;
    ++iterations;
    CHECK(std::stoul(value_of(line, "iter")) == iterations);
    const std::string theta = value_of(line, "theta");
    const auto a = theta.find(',');
    last_centre = std::stod(theta.substr(a + 1, theta.find(',', a + 1) - a - 1));
  }
  CHECK(iterations >= 1);
  CHECK(iterations <= 10);
  CHECK(std::abs(last_centre - 7.0) <= 0.2);
  CHECK(value_of(r.out, "converged") == "1");
  CHECK(load_labels(dir / "a.lab", 3).size() == 128u * 128u);
}

TEST_CASE("segment and adapt agree on same-contrast data") {
  TempDir dir;
  REQUIRE(cli(dir, "phantom --seed 1 --out-img tr.cav --out-labels tr.lab").code == 0);
  REQUIRE(cli(dir, "phantom --seed 2 --out-img te.cav").code == 0);
  const std::string train = "--train-img tr.cav --train-labels tr.lab --soften-sigma 1 --input te.cav ";
  REQUIRE(cli(dir, "segment " + train + "--out-labels s.lab").code == 0);
  REQUIRE(cli(dir, "adapt " + train + "--add-noise-std 0.5 --out-labels a.lab").code == 0);
  const Run m = cli(dir, "metrics --pred s.lab --truth a.lab");
  REQUIRE(m.code == 0);
  CHECK(std::stod(value_of(m.out, "error")) < 0.001);
}

TEST_CASE("simulate maps a probability file through the centroids") {
  TempDir dir;
  save_probmap(ProbMap({1, 2}, 2, {0.5, 0.5, 1.0, 0.0}), dir / "p.cap");
  REQUIRE(cli(dir, "simulate --prob p.cap --theta 2,4 --out s.cav").code == 0);
  const ScalarImage s = load_volume(dir / "s.cav");
  CHECK(s[0] == 3.0);
  CHECK(s[1] == 2.0);
  CHECK(cli(dir, "simulate --prob p.cap --theta 1,2,3 --out s.cav").code == 3);
}

TEST_CASE("sweep writes an ordered CSV") {
  TempDir dir;
  REQUIRE(cli(dir, "sweep --lo 6 --hi 7 --step 0.5 --trials 1 --max-iters 3 --jobs 2 --out s.csv").code == 0);
  std::istringstream lines(read_file(dir / "s.csv"));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "mean,ideal,fixed,adaptive");
  std::vector<std::string> means;
  while (std::getline(lines, line)) means.push_back(line.substr(0, line.find(',')));
  CHECK(means == std::vector<std::string>{"6", "6.5", "7"});
}
