#include <sys/wait.h>

#include <clocale>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "report.hpp"

using namespace psa::cli;

namespace {

int run_cli(const std::string& args, std::string* output = nullptr) {
  const auto out_path = std::filesystem::temp_directory_path() /
                        ("psa_cli_" + std::to_string(::getpid()) + ".out");
  const std::string command = std::string(PSA_CLI_PATH) + " " + args + " > " + out_path.string() + " 2>/dev/null";
  const int raw = std::system(command.c_str());
  if (output) {
    std::ifstream in(out_path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    *output = text.str();
  }
  std::filesystem::remove(out_path);
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

int code_of(const RunConfig& config) {
  try {
    return run(config).exit_code;
  } catch (const RunError& e) {
    return e.exit_code();
  }
}

RunConfig table_config(const std::string& fn, std::vector<std::uint64_t> grid = {1000, 10'000, 100'000, 1'000'000}) {
  RunConfig config;
  config.command = "table";
  config.function_id = fn;
  config.grid = std::move(grid);
  return config;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) fields.push_back(cell);
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_CASE("grid parsing") {
  CHECK(parse_grid("1000:1000000:g10") == std::vector<std::uint64_t>{1000, 10'000, 100'000, 1'000'000});
  CHECK(parse_grid("10:100:g3") == std::vector<std::uint64_t>{10, 30, 90});
  CHECK(parse_grid("1000,10000,100000") == std::vector<std::uint64_t>{1000, 10'000, 100'000});
  CHECK(parse_grid("1e3,1e4") == std::vector<std::uint64_t>{1000, 10'000});
  CHECK(parse_grid("1e3:1e7:g10").size() == 5);
  CHECK(parse_grid("17") == std::vector<std::uint64_t>{17});
  for (const char* bad : {"", "1000,100", "1000,1000", "1,10", "10.5,20", "abc", "10:5:g10", "10:100:10",
                          "10:100:g1", "10:100:g", "10,,20", "-5,10"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_grid(bad), RunError);
  }
}

TEST_CASE("parameter parsing") {
  CHECK(parse_param("m=1.5") == std::pair<std::string, double>{"m", 1.5});
  CHECK(parse_param("k=2") == std::pair<std::string, double>{"k", 2.0});
  CHECK_THROWS_AS(parse_param("x=1"), RunError);
  CHECK_THROWS_AS(parse_param("m"), RunError);
  CHECK_THROWS_AS(parse_param("m=abc"), RunError);
}

TEST_CASE("number formatting is locale independent with 12 significant digits") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(78626.5039956820644) == "78626.5039957");
  CHECK(format_number(3.6191206822e10) == "36191206822");
  CHECK(format_number(1.23456789e20) == "1.23456789e+20");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
  if (std::setlocale(LC_ALL, "de_DE.UTF-8") != nullptr) {
    CHECK(format_number(0.5) == "0.5");
    std::setlocale(LC_ALL, "C");
  }
}

TEST_CASE("table columns and trends") {
  const auto out = run(table_config("one"));
  const auto rows = parse_csv(out.text);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"n", "exact", "main_crude", "bound_crude", "main_li", "bound_pnt",
                                            "bound_rh", "ratio_exact_over_li", "err_li", "err_over_bound_pnt",
                                            "err_over_bound_rh"});
  double previous = INFINITY;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 11);
    const double distance = std::fabs(std::stod(rows[i][7]) - 1.0);
    CHECK(distance < previous);
    previous = distance;
  }
  CHECK(rows[4][1] == "78498");

  const auto log_rows = parse_csv(run(table_config("log")).text);
  previous = INFINITY;
  for (std::size_t i = 1; i < log_rows.size(); ++i) {
    const double n = std::stod(log_rows[i][0]);
    const double distance = std::fabs(std::stod(log_rows[i][1]) / n - 1.0);
    CHECK(distance < previous);
    previous = distance;
  }

  const auto recip_rows = parse_csv(run(table_config("recip", {1'000'000})).text);
  CHECK(std::fabs(std::stod(recip_rows[1][1]) - std::log(std::log(1e6))) < 1.0);
}

TEST_CASE("table output is deterministic and independent of --jobs") {
  auto config = table_config("power");
  config.m = 0.5;
  const auto a = run(config).text;
  const auto b = run(config).text;
  config.jobs = 3;
  const auto c = run(config).text;
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("json output echoes the config") {
  auto config = table_config("power", {1000, 10'000});
  config.m = 1.0;
  config.c = 0.7;
  config.theta = 0.6;
  config.format = Format::json;
  const auto doc = nlohmann::json::parse(run(config).text);
  CHECK(doc["config"]["command"] == "table");
  CHECK(doc["config"]["function"] == "power");
  CHECK(doc["config"]["params"]["m"] == 1.0);
  CHECK(doc["config"]["grid"] == nlohmann::json::array({1000, 10000}));
  CHECK(doc["config"]["c"] == 0.7);
  CHECK(doc["config"]["theta"] == 0.6);
  CHECK(doc["config"]["format"] == "json");
  CHECK(doc["columns"].size() == 11);
  REQUIRE(doc["rows"].size() == 2);
  CHECK(doc["rows"][1]["n"] == 10000);
  CHECK(doc["rows"][1]["exact"] == 5736396.0);
}

TEST_CASE("product-bound") {
  RunConfig config;
  config.command = "product-bound";
  const auto out = run(config);
  CHECK(out.exit_code == kExitOk);
  const auto rows = parse_csv(out.text);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0] == std::vector<std::string>{"n", "theta", "bound_crude_log", "bound_rh_log", "slack"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][4]) > 0);

  // theta(n) < n at desk scale, so even vanishing constants leave positive slack
  config.c2 = 1e-9;
  config.c1 = 1e-9;
  config.grid = {10'000, 100'000, 1'000'000};
  const auto tight = run(config);
  CHECK(tight.exit_code == kExitOk);
  for (const auto& row : parse_csv(tight.text)) {
    if (row[0] != "n") CHECK(std::stod(row[4]) > 0);
  }
}

TEST_CASE("conditions") {
  RunConfig config;
  config.command = "conditions";
  config.function_id = "recip";
  CHECK(run(config).exit_code == kExitOk);
  config.function_id = "exp2";
  const auto out = run(config);
  CHECK(out.exit_code == kExitCheckFailed);
  CHECK(out.text.find("necessary_ratio_to_zero,fails") != std::string::npos);
  config.function_id = "one";
  CHECK(run(config).text.find("degenerate-convergent") != std::string::npos);
}

TEST_CASE("verify") {
  RunConfig config;
  config.command = "verify";
  const auto out = run(config);
  CHECK(out.exit_code == kExitOk);
  CHECK(out.text.find("fail") == std::string::npos);
  config.abel_tol = 1e-30;
  CHECK(run(config).exit_code == kExitCheckFailed);
}

TEST_CASE("exit codes from the library layer") {
  auto config = table_config("log_over_t");
  CHECK(code_of(config) == kExitHypothesis);
  config = table_config("exp2");
  CHECK(code_of(config) == kExitHypothesis);
  config = table_config("nope");
  CHECK(code_of(config) == kExitUsage);
  config = table_config("power");
  CHECK(code_of(config) == kExitUsage);  // missing m
  config = table_config("one", {1000, 1ull << 41});
  CHECK(code_of(config) == kExitResource);
  config = table_config("one");
  config.epsilon = 0.7;
  CHECK(code_of(config) == kExitUsage);
  config.command = "bogus";
  config.epsilon = 0.05;
  CHECK(code_of(config) == kExitUsage);
}

TEST_CASE("command line") {
  std::string a, b;
  CHECK(run_cli("table --function one --grid 1000:100000:g10", &a) == 0);
  CHECK(run_cli("table --function one --grid 1000:100000:g10", &b) == 0);
  CHECK(a == b);
  CHECK(a.rfind("n,exact,", 0) == 0);

  std::string json;
  CHECK(run_cli("table --function power --param m=1 --grid 1000,10000 --format json", &json) == 0);
  CHECK(nlohmann::json::parse(json)["config"]["params"]["m"] == 1.0);

  CHECK(run_cli("table --function one --grid 1000,10") == 2);
  CHECK(run_cli("table --function one --format xml") == 2);
  CHECK(run_cli("table --function one --param q=1") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("table --function log_over_t --grid 1000,10000") == 3);
  CHECK(run_cli("conditions --function exp2") == 1);
  CHECK(run_cli("conditions --function recip") == 0);
  CHECK(run_cli("product-bound") == 0);
  CHECK(run_cli("verify") == 0);

  const auto path = std::filesystem::temp_directory_path() / ("psa_out_" + std::to_string(::getpid()) + ".csv");
  std::string stdout_text;
  CHECK(run_cli("product-bound --grid 10,100 --out " + path.string(), &stdout_text) == 0);
  CHECK(stdout_text.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "n,theta,bound_crude_log,bound_rh_log,slack");
  std::filesystem::remove(path);
}
