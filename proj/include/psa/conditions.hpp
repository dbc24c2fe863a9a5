#pragma once

#include <string>
#include <vector>

#include "psa/functions.hpp"
#include "psa/prime_engine.hpp"

namespace psa {

enum class Verdict { holds, fails, inconclusive, degenerate_convergent };

const char* to_string(Verdict verdict) noexcept;

struct Evidence {
  double n;
  double statistic;
};

struct ConditionResult {
  std::string name;
  Verdict verdict = Verdict::inconclusive;
  std::vector<Evidence> evidence;
  std::string note;
  bool log_scale = false;  // statistic is log|value| rather than the value
};

struct ConditionReport {
  std::string function_id;
  std::vector<Integer> grid;
  std::vector<ConditionResult> conditions;

  bool any_fails() const;
  const ConditionResult& at(const std::string& name) const;
};

// Finite-data stand-ins for limit statements. All are heuristics over the top
// half of the grid and can be tightened or relaxed per call.
struct ConditionThresholds {
  double ratio_distance = 0.05;           // condition 1: |stat - 1| floor
  double divergence_growth = 0.10;        // condition 3: growth per decade
  double necessary_decay = 0.25;          // r(p): decay per decade for "holds"
  double necessary_fail_level = 0.5;      // r(p): floor for "fails"
  double increasing_ratio_floor = 0.05;   // f / (n f') floor
};

struct BSum {
  Integer n;
  double value;  // sum_{k=2}^n 1 / log k
};

BSum b_sum(Integer n);
// One pass over k for a strictly increasing grid.
std::vector<BSum> b_sums(const std::vector<Integer>& grid);

std::vector<Integer> default_grid();
// Smallest prime >= each default grid point.
std::vector<Integer> default_prime_grid();

// Conditions 1-3 in integral form:
//   1. int t f'/log t  /  (n f(n)/log n) stays away from 1
//   2. f monotone with f' != 0
//   3. |int t f'/log t| grows without bound
// Constant f is reported as degenerate_convergent on all three.
ConditionReport check_sufficient(const FunctionSpec& spec, const std::vector<Integer>& grid,
                                 const ConditionThresholds& thresholds = {});

struct MonotoneCheck {
  Verdict verdict = Verdict::inconclusive;
  std::vector<Evidence> probe;  // (n, f(n) / (n f'(n)))
  std::string note;
};

// f -> inf, f' > 0 and f/(n f') not tending to 0, on a decade probe grid
// 10 .. 10^12 evaluated in log space.
MonotoneCheck check_monotone_increasing(const FunctionSpec& spec,
                                        const ConditionThresholds& thresholds = {});

// r(p) = |f(p) / sum_{k<=p} f(k)/log k| at each grid prime; r must tend to 0.
ConditionReport check_necessary(const FunctionSpec& spec, const std::vector<Integer>& prime_grid,
                                const ConditionThresholds& thresholds = {});

// sum_{p<=n} f(p) / sum_{k=2}^n f(k)/log k along the grid, with a verdict on
// whether it approaches 1.
ConditionResult ratio_trail(const FunctionSpec& spec, const std::vector<Integer>& grid,
                            const PrimeEngine& engine);

}  // namespace psa
