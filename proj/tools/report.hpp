#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace psa::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitHypothesis = 3,
  kExitResource = 4,
};

enum class Format { csv, json };

struct RunConfig {
  std::string command;  // table | conditions | product-bound | verify
  std::string function_id;
  std::optional<double> m;
  std::optional<double> k;
  std::vector<std::uint64_t> grid;
  std::string grid_spec;
  double c = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double epsilon = 0.05;
  double theta = 0.5;
  double abel_tol = 1e-9;
  double parts_tol = 1e-6;
  Format format = Format::csv;
  std::string out_path;
  unsigned jobs = 1;
};

class RunError : public std::runtime_error {
 public:
  RunError(int exit_code, const std::string& what) : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

// "a:b:gN" (geometric from a to b, ratio N) or "a,b,c". Values may use
// exponent notation (1e6) but must be integers >= 2 and strictly increasing.
std::vector<std::uint64_t> parse_grid(std::string_view text);

// "m=1.5" -> ("m", 1.5)
std::pair<std::string, double> parse_param(std::string_view text);

// 12 significant digits, '.' decimal point regardless of locale.
std::string format_number(double value);

struct Output {
  std::string text;
  int exit_code = kExitOk;
};

// Throws RunError for usage, hypothesis and resource failures.
Output run(const RunConfig& config);

}  // namespace psa::cli
