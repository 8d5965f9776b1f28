#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "steinbound/errors.hpp"
#include "steinbound/sweep.hpp"

namespace sw = steinbound::sweep;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("steinbound_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

sw::SweepConfig small_audit() {
  sw::SweepConfig c;
  c.ns = {50, 100, 200, 400};
  c.ps = {0.0, 3.0, 5.0};
  return c;
}

}  // namespace

TEST_CASE("doubles keep 17 significant digits") {
  CHECK(sw::format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(sw::format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(sw::format_double(std::nan("")) == "nan");
  CHECK(sw::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("formats") {
  CHECK(sw::parse_format("csv") == sw::Format::csv);
  CHECK(sw::parse_format("json") == sw::Format::json);
  CHECK_THROWS_AS(sw::parse_format("xml"), steinbound::InvalidParameter);
}

TEST_CASE("audit CSV rows round-trip through JSON") {
  const auto result = sw::run_audit(small_audit());
  REQUIRE(result.tables.size() == 2);
  const auto& audit = result.tables[0];
  CHECK(audit.columns == sw::audit_columns());
  CHECK(audit.rows.size() == 12);

  const auto csv = parse_csv(sw::to_csv(audit));
  CHECK(csv[0].size() == 12);
  std::string header;
  for (std::size_t i = 0; i < csv[0].size(); ++i) header += (i ? "," : "") + csv[0][i];
  CHECK(header ==
        "model,n,p,distance,argsup_z,term_condvar,term_remainder,term_a,term_a3,term_delta4,"
        "implied_const_rate,implied_const_papernorm");

  const auto doc = nlohmann::json::parse(sw::to_json(result.tables));
  REQUIRE(doc.contains("audit"));
  REQUIRE(doc.contains("fits"));
  REQUIRE(doc["audit"].size() == csv.size() - 1);
  for (std::size_t r = 1; r < csv.size(); ++r) {
    const auto& obj = doc["audit"][r - 1];
    for (std::size_t c = 0; c < csv[0].size(); ++c) {
      const auto& v = obj[csv[0][c]];
      if (v.is_string()) {
        CHECK(v.get<std::string>() == csv[r][c]);
      } else if (v.is_number_integer()) {
        CHECK(v.get<long>() == std::stol(csv[r][c]));
      } else {
        CHECK(v.get<double>() == std::stod(csv[r][c]));
      }
    }
  }
  // Support-bound truncation makes the fourth-moment term vanish everywhere.
  for (const auto& row : doc["audit"]) CHECK(row["term_delta4"].get<double>() == 0.0);
  CHECK(doc["fits"].size() == 3);
}

TEST_CASE("thread count does not change the output") {
  auto one = small_audit();
  one.model = "monomer-dimer";
  auto many = one;
  many.threads = 8;
  auto automatic = one;
  automatic.threads = 0;
  const auto a = sw::run_audit(one);
  const auto b = sw::run_audit(many);
  const auto c = sw::run_audit(automatic);
  CHECK(sw::to_json(a.tables) == sw::to_json(b.tables));
  CHECK(sw::to_json(a.tables) == sw::to_json(c.tables));
  CHECK(sw::to_csv(a.tables[0]) == sw::to_csv(b.tables[0]));
}

TEST_CASE("parallel_map keeps order and rethrows the lowest failure") {
  const std::function<int(std::size_t)> square = [](std::size_t i) { return static_cast<int>(i * i); };
  const auto out = sw::parallel_map<int>(100, 7, square);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  CHECK(sw::parallel_map<int>(0, 4, square).empty());

  std::atomic<int> ran{0};
  const std::function<int(std::size_t)> failing = [&](std::size_t i) -> int {
    ++ran;
    if (i == 17 || i == 40) throw std::runtime_error("job " + std::to_string(i));
    return 0;
  };
  for (unsigned threads : {1U, 3U, 8U}) {
    ran = 0;
    try {
      sw::parallel_map<int>(64, threads, failing);
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "job 17");
    }
    CHECK(ran == 64);
  }
}

TEST_CASE("sweep validation names the field") {
  auto expect_field = [](sw::SweepConfig c, const std::string& field) {
    try {
      sw::run_audit(c);
      FAIL("expected validation error for " << field);
    } catch (const steinbound::InvalidParameter& e) {
      CHECK(std::string(e.what()).rfind(field + ":", 0) == 0);
    }
  };
  auto c = small_audit();
  c.ns = {100, 50, 400};
  expect_field(c, "n");
  c = small_audit();
  c.ns.clear();
  expect_field(c, "n");
  c = small_audit();
  c.ps.clear();
  expect_field(c, "p");
  c = small_audit();
  c.ps = {-1.0};
  expect_field(c, "p");
  c = small_audit();
  c.a_rule = "fixed";
  expect_field(c, "a");
  c = small_audit();
  c.a_rule = "sometimes";
  expect_field(c, "a-rule");
  c = small_audit();
  c.beta = 0.0;
  expect_field(c, "beta");
  c = small_audit();
  c.model = "ising";
  CHECK_THROWS_AS(sw::run_audit(c), steinbound::InvalidParameter);

  sw::SweepConfig laws;
  laws.laws = {{0, 1.0}};
  try {
    sw::run_limit_law(laws);
    FAIL("expected validation error");
  } catch (const steinbound::InvalidParameter& e) {
    CHECK(std::string(e.what()).rfind("k:", 0) == 0);
  }
}

TEST_CASE("fixed truncation level") {
  auto c = small_audit();
  c.a_rule = "fixed";
  c.a = 0.05;
  const auto result = sw::run_audit(c);
  for (const auto& row : result.tables[0].rows) CHECK(std::get<double>(row[7]) == 0.05);
}

TEST_CASE("limit-law and stein-check runners") {
  const auto limit = sw::run_limit_law({});
  CHECK(limit.status == 0);
  REQUIRE(limit.tables.size() == 1);
  const auto& first = limit.tables[0].rows.at(0);
  CHECK(std::get<double>(first[2]) == doctest::Approx(0.398942).epsilon(1e-6));
  for (const auto& row : limit.tables[0].rows) {
    CHECK(std::get<double>(row[7]) >= 0.0);
    CHECK(std::get<long>(row[8]) == 0);
  }

  const auto stein = sw::run_stein_check({});
  CHECK(stein.status == 0);
  for (const auto& row : stein.tables[0].rows) {
    CHECK(std::get<double>(row[3]) < 1e-8);
    CHECK(std::get<double>(row[6]) <= std::get<double>(row[7]) + 1e-12);
    CHECK(std::get<double>(row[8]) <= 1.0 + 1e-12);
    CHECK(std::get<long>(row[9]) == 0);
  }
}

TEST_CASE("oracle runner") {
  sw::SweepConfig c;
  c.max_n = 8;
  const auto ok = sw::run_oracle(c);
  CHECK(ok.status == 0);
  CHECK(!ok.tables[0].rows.empty());
  c.max_n = 15;
  CHECK_THROWS_AS(sw::run_oracle(c), steinbound::InvalidParameter);
  c.max_n = 8;
  c.oracle_models = {"", ""};
  CHECK_THROWS_WITH_AS(sw::run_oracle(c), "model: model list is empty", steinbound::InvalidParameter);
  c.oracle_models = {"curie-weiss"};
  c.max_n = 12;
  CHECK(sw::run_oracle(c).status == 0);
}

TEST_CASE("emit writes sibling tables and reports bad paths") {
  TempDir dir;
  auto c = small_audit();
  c.out = (dir.path / "audit.csv").string();
  sw::emit(c, sw::run_audit(c));
  CHECK(fs::exists(dir.path / "audit.csv"));
  CHECK(fs::exists(dir.path / "audit.fits.csv"));
  CHECK(slurp(dir.path / "audit.csv").rfind("model,n,p,", 0) == 0);
  CHECK(slurp(dir.path / "audit.fits.csv").rfind("model,p,slope,", 0) == 0);

  c.format = sw::Format::json;
  c.out = (dir.path / "audit.json").string();
  sw::emit(c, sw::run_audit(c));
  CHECK(nlohmann::json::parse(slurp(dir.path / "audit.json")).contains("fits"));

  CHECK_THROWS_AS(sw::write_output((dir.path / "missing" / "x.csv").string(), "x"), steinbound::IoError);
  try {
    sw::write_output((dir.path / "missing" / "x.csv").string(), "x");
  } catch (const steinbound::IoError& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
}
