#include "report.hpp"

#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>
#include <thread>
#include <variant>

#include "json.hpp"
#include "psa/psa.h"

namespace psa::cli {

namespace {

using Cell = std::variant<std::uint64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct EngineDeleter {
  void operator()(psa_engine* e) const { psa_engine_destroy(e); }
};
struct FunctionDeleter {
  void operator()(psa_function* f) const { psa_function_destroy(f); }
};
struct ReportDeleter {
  void operator()(psa_report* r) const { psa_report_destroy(r); }
};
using EnginePtr = std::unique_ptr<psa_engine, EngineDeleter>;
using FunctionPtr = std::unique_ptr<psa_function, FunctionDeleter>;
using ReportPtr = std::unique_ptr<psa_report, ReportDeleter>;

int exit_code_for(psa_status status) {
  switch (status) {
    case PSA_OK: return kExitOk;
    case PSA_ERR_INVALID_ARGUMENT:
    case PSA_ERR_INVALID_PARAMS:
    case PSA_ERR_UNKNOWN_ID: return kExitUsage;
    case PSA_ERR_HYPOTHESIS:
    case PSA_ERR_OVERFLOW: return kExitHypothesis;
    case PSA_ERR_INVALID_RANGE:
    case PSA_ERR_RANGE_TOO_LARGE:
    case PSA_ERR_MAX_SUBDIVISIONS:
    case PSA_ERR_IO: return kExitResource;
    case PSA_ERR_CALLBACK:
    case PSA_ERR_INTERNAL: return kExitCheckFailed;
  }
  return kExitCheckFailed;
}

void check(psa_status status) {
  if (status != PSA_OK)
    throw RunError(exit_code_for(status), std::string(psa_status_name(status)) + ": " + psa_last_error());
}

EnginePtr make_engine() {
  psa_engine* raw = nullptr;
  check(psa_engine_create(0, nullptr, 1, &raw));
  return EnginePtr(raw);
}

FunctionPtr make_function(const std::string& id, std::optional<double> m, std::optional<double> k) {
  psa_function* raw = nullptr;
  check(psa_function_create(id.c_str(), m ? &*m : nullptr, k ? &*k : nullptr, &raw));
  return FunctionPtr(raw);
}

FunctionPtr make_function(const RunConfig& config) {
  if (config.function_id.empty()) throw RunError(kExitUsage, "--function is required for " + config.command);
  return make_function(config.function_id, config.m, config.k);
}

psa_model model_of(const RunConfig& config) {
  psa_model model;
  psa_model_default(&model);
  model.c = config.c;
  model.c1 = config.c1;
  model.c2 = config.c2;
  model.epsilon = config.epsilon;
  model.theta = config.theta;
  return model;
}

std::vector<std::uint64_t> grid_or(const RunConfig& config, std::string_view fallback) {
  return config.grid.empty() ? parse_grid(fallback) : config.grid;
}

double round12(double v) {
  if (!std::isfinite(v)) return v;
  const auto text = format_number(v);
  double rounded = v;
  std::from_chars(text.data(), text.data() + text.size(), rounded);
  return rounded;
}

std::string csv_field(const Cell& cell) {
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) return std::to_string(*u);
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  const auto& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string quoted = "\"";
  for (const char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + '"';
}

nlohmann::ordered_json json_cell(const Cell& cell) {
  if (const auto* u = std::get_if<std::uint64_t>(&cell)) return *u;
  if (const auto* d = std::get_if<double>(&cell)) {
    if (!std::isfinite(*d)) return nullptr;
    return round12(*d);
  }
  return std::get<std::string>(cell);
}

nlohmann::ordered_json config_echo(const RunConfig& config, const std::vector<std::uint64_t>& grid) {
  nlohmann::ordered_json echo;
  echo["command"] = config.command;
  echo["function"] = config.function_id;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  if (config.m) params["m"] = *config.m;
  if (config.k) params["k"] = *config.k;
  echo["params"] = params;
  echo["grid"] = grid;
  echo["c"] = config.c;
  echo["c1"] = config.c1;
  echo["c2"] = config.c2;
  echo["epsilon"] = config.epsilon;
  echo["theta"] = config.theta;
  echo["abel_tol"] = config.abel_tol;
  echo["parts_tol"] = config.parts_tol;
  echo["format"] = config.format == Format::csv ? "csv" : "json";
  return echo;
}

std::string render(const Table& table, const RunConfig& config, const std::vector<std::uint64_t>& grid) {
  if (config.format == Format::csv) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
    out += '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
      out += '\n';
    }
    return out;
  }
  nlohmann::ordered_json doc;
  doc["config"] = config_echo(config, grid);
  doc["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

Output run_table(const RunConfig& config) {
  const auto grid = grid_or(config, "1000:1000000:g10");
  const auto engine = make_engine();
  const auto fn = make_function(config);
  const auto model = model_of(config);

  std::vector<psa_table_row> rows(grid.size());
  std::vector<psa_status> status(grid.size(), PSA_OK);
  std::vector<std::string> errors(grid.size());
  const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(grid.size())));
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < grid.size(); i += jobs) {
      status[i] = psa_table_row_compute(engine.get(), fn.get(), grid[i], &model, &rows[i]);
      if (status[i] != PSA_OK) errors[i] = psa_last_error();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (status[i] != PSA_OK)
      throw RunError(exit_code_for(status[i]), std::string(psa_status_name(status[i])) + ": " + errors[i]);

  Table table;
  table.columns = {"n",        "exact",    "main_crude",          "bound_crude",
                   "main_li",  "bound_pnt", "bound_rh",           "ratio_exact_over_li",
                   "err_li",   "err_over_bound_pnt", "err_over_bound_rh"};
  for (const auto& r : rows)
    table.rows.push_back({r.n, r.exact, r.main_crude, r.bound_crude, r.main_li, r.bound_pnt, r.bound_rh,
                          r.ratio_exact_over_li, r.err_li, r.err_over_bound_pnt, r.err_over_bound_rh});
  return Output{render(table, config, grid), kExitOk};
}

Output run_product_bound(const RunConfig& config) {
  const auto grid = grid_or(config, "10:10000000:g10");
  const auto engine = make_engine();
  const auto model = model_of(config);
  Table table;
  table.columns = {"n", "theta", "bound_crude_log", "bound_rh_log", "slack"};
  bool all_positive = true;
  for (const auto n : grid) {
    psa_product_row row;
    check(psa_product_row_compute(engine.get(), n, &model, &row));
    all_positive = all_positive && row.slack > 0.0;
    table.rows.push_back({row.n, row.theta, row.bound_crude_log, row.bound_rh_log, row.slack});
  }
  return Output{render(table, config, grid), all_positive ? kExitOk : kExitCheckFailed};
}

void append_report(Table& table, const std::string& check_name, const psa_report* report) {
  for (std::size_t i = 0; i < psa_report_condition_count(report); ++i) {
    const std::string name = psa_report_condition_name(report, i);
    const std::string verdict = psa_verdict_name(psa_report_condition_verdict(report, i));
    const std::string scale = psa_report_condition_log_scale(report, i) ? "log" : "linear";
    for (std::size_t j = 0; j < psa_report_evidence_count(report, i); ++j) {
      double n = 0.0, stat = 0.0;
      check(psa_report_evidence(report, i, j, &n, &stat));
      table.rows.push_back({check_name, name, verdict, static_cast<std::uint64_t>(n), stat, scale});
    }
  }
}

nlohmann::ordered_json report_json(const std::string& check_name, const psa_report* report) {
  nlohmann::ordered_json out;
  out["check"] = check_name;
  auto conditions = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < psa_report_condition_count(report); ++i) {
    nlohmann::ordered_json c;
    c["name"] = psa_report_condition_name(report, i);
    c["verdict"] = psa_verdict_name(psa_report_condition_verdict(report, i));
    c["note"] = psa_report_condition_note(report, i);
    c["scale"] = psa_report_condition_log_scale(report, i) ? "log" : "linear";
    auto evidence = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < psa_report_evidence_count(report, i); ++j) {
      double n = 0.0, stat = 0.0;
      check(psa_report_evidence(report, i, j, &n, &stat));
      evidence.push_back({static_cast<std::uint64_t>(n), json_cell(stat)});
    }
    c["evidence"] = std::move(evidence);
    conditions.push_back(std::move(c));
  }
  out["conditions"] = std::move(conditions);
  return out;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

Output run_conditions(const RunConfig& config) {
  const auto engine = make_engine();
  const auto fn = make_function(config);

  std::vector<std::uint64_t> grid = config.grid;
  std::vector<std::uint64_t> primes;
  if (grid.empty()) {
    std::size_t len = 0;
    check(psa_default_grid(nullptr, 0, &len));
    grid.resize(len);
    check(psa_default_grid(grid.data(), grid.size(), &len));
    check(psa_default_prime_grid(nullptr, 0, &len));
    primes.resize(len);
    check(psa_default_prime_grid(primes.data(), primes.size(), &len));
  } else {
    for (auto n : grid) {
      while (!is_prime(n)) ++n;
      if (!primes.empty() && n <= primes.back())
        throw RunError(kExitUsage, "grid points must be separated by at least one prime");
      primes.push_back(n);
    }
  }

  std::vector<std::pair<std::string, ReportPtr>> reports;
  auto add = [&](const std::string& name, auto&& compute) {
    psa_report* raw = nullptr;
    const psa_status status = compute(&raw);
    ReportPtr owned(raw);
    check(status);
    reports.emplace_back(name, std::move(owned));
  };
  add("sufficient", [&](psa_report** out) { return psa_check_sufficient(fn.get(), grid.data(), grid.size(), out); });
  add("necessary", [&](psa_report** out) { return psa_check_necessary(fn.get(), primes.data(), primes.size(), out); });
  psa_function_info info;
  check(psa_function_info_get(fn.get(), &info));
  if (info.monotone == PSA_INCREASING)
    add("increasing", [&](psa_report** out) { return psa_check_monotone_increasing(fn.get(), out); });
  add("ratio", [&](psa_report** out) {
    return psa_ratio_trail(engine.get(), fn.get(), grid.data(), grid.size(), out);
  });

  bool any_fails = false;
  for (const auto& [name, report] : reports) any_fails = any_fails || psa_report_any_fails(report.get());
  const int code = any_fails ? kExitCheckFailed : kExitOk;

  if (config.format == Format::json) {
    nlohmann::ordered_json doc;
    doc["config"] = config_echo(config, grid);
    doc["function"] = psa_function_label(fn.get());
    doc["prime_grid"] = primes;
    auto checks = nlohmann::ordered_json::array();
    for (const auto& [name, report] : reports) checks.push_back(report_json(name, report.get()));
    doc["checks"] = std::move(checks);
    doc["any_fails"] = any_fails;
    return Output{doc.dump(2) + "\n", code};
  }
  Table table;
  table.columns = {"check", "condition", "verdict", "n", "statistic", "scale"};
  for (const auto& [name, report] : reports) append_report(table, name, report.get());
  return Output{render(table, config, grid), code};
}

Output run_verify(const RunConfig& config) {
  struct Case {
    std::string id;
    std::optional<double> m;
  };
  std::vector<Case> cases;
  if (config.function_id.empty()) {
    cases = {{"one", {}}, {"log", {}}, {"recip", {}}, {"log_over_t", {}}, {"power", 1.0}, {"power", 0.5}};
  } else {
    cases = {{config.function_id, config.m}};
  }
  const auto engine = make_engine();

  Table table;
  table.columns = {"suite", "function", "n", "statistic", "tolerance", "result"};
  bool all_pass = true;
  auto record = [&](const char* suite, const std::string& label, std::uint64_t n, double stat, double tol) {
    const bool pass = std::isfinite(stat) && stat <= tol;
    all_pass = all_pass && pass;
    table.rows.push_back({std::string(suite), label, n, stat, tol, std::string(pass ? "pass" : "fail")});
  };

  for (const auto& c : cases) {
    const auto fn = make_function(c.id, c.m, c.id == config.function_id ? config.k : std::nullopt);
    const std::string label = psa_function_label(fn.get());
    for (const std::uint64_t n : {10ULL, 100ULL, 1000ULL, 10000ULL}) {
      psa_exact_sum exact, abel;
      check(psa_exact_sum_compute(engine.get(), fn.get(), n, &exact));
      check(psa_abel_sum_compute(engine.get(), fn.get(), n, &abel));
      const double rel = std::fabs(abel.value - exact.value) / std::max(std::fabs(exact.value), 1e-300);
      record("abel", label, n, rel, config.abel_tol);
    }
    for (const std::uint64_t n : {1000ULL, 100000ULL}) {
      psa_parts_identity parts;
      check(psa_parts_identity_check(fn.get(), static_cast<double>(n), &parts));
      record("parts", label, n, parts.rel_diff, config.parts_tol);
    }
  }
  return Output{render(table, config, {}), all_pass ? kExitOk : kExitCheckFailed};
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 12);
  return std::string(buffer, result.ptr);
}

std::vector<std::uint64_t> parse_grid(std::string_view text) {
  auto parse_integer = [&](std::string_view token) -> std::uint64_t {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size() || !(v >= 2.0) || v > 1.8e19 ||
        std::floor(v) != v)
      throw RunError(kExitUsage, "invalid grid value '" + std::string(token) + "'");
    return static_cast<std::uint64_t>(v);
  };

  std::vector<std::uint64_t> grid;
  if (text.find(':') != std::string_view::npos) {
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (second == std::string_view::npos || text.substr(second + 1).size() < 2 || text[second + 1] != 'g')
      throw RunError(kExitUsage, "geometric grid must look like a:b:gN");
    const auto lo = parse_integer(text.substr(0, first));
    const auto hi = parse_integer(text.substr(first + 1, second - first - 1));
    const auto ratio = parse_integer(text.substr(second + 2));
    if (hi < lo) throw RunError(kExitUsage, "grid end precedes start");
    // Multiply in integers so 10^k grids are exact.
    for (std::uint64_t n = lo; n <= hi; n *= ratio) {
      grid.push_back(n);
      if (n > hi / ratio) break;
    }
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto end = std::min(text.find(',', start), text.size());
      grid.push_back(parse_integer(text.substr(start, end - start)));
      start = end + 1;
    }
  }
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1]) throw RunError(kExitUsage, "grid must be strictly increasing");
  if (grid.empty()) throw RunError(kExitUsage, "grid is empty");
  return grid;
}

std::pair<std::string, double> parse_param(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) throw RunError(kExitUsage, "parameter must look like name=value");
  const std::string name(text.substr(0, eq));
  if (name != "m" && name != "k") throw RunError(kExitUsage, "unknown parameter '" + name + "'");
  const auto value = text.substr(eq + 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw RunError(kExitUsage, "invalid value for parameter " + name);
  return {name, v};
}

Output run(const RunConfig& config) {
  if (!(config.c > 0 && config.c1 > 0 && config.c2 > 0))
    throw RunError(kExitUsage, "constants c, c1, c2 must be positive");
  if (!(config.epsilon > 0 && config.epsilon < 0.5)) throw RunError(kExitUsage, "epsilon must lie in (0, 1/2)");
  if (!(config.theta > 0 && config.theta <= 1)) throw RunError(kExitUsage, "theta must lie in (0, 1]");
  if (config.command == "table") return run_table(config);
  if (config.command == "product-bound") return run_product_bound(config);
  if (config.command == "conditions") return run_conditions(config);
  if (config.command == "verify") return run_verify(config);
  throw RunError(kExitUsage, "unknown command '" + config.command + "'");
}

}  // namespace psa::cli
