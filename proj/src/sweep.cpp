#include "steinbound/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "steinbound/errors.hpp"
#include "steinbound/limit_law.hpp"
#include "steinbound/oracle.hpp"
#include "steinbound/stein.hpp"

namespace steinbound::sweep {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw InvalidParameter(field + ": " + what);
}

void validate_laws(const SweepConfig& c) {
  require(!c.laws.empty(), "k", "at least one (k, a) pair is required");
  for (const Law& law : c.laws) {
    require(law.k >= 1, "k", "must be >= 1, got " + std::to_string(law.k));
    require(law.a > 0.0 && std::isfinite(law.a), "a", "must be positive and finite, got " + format_double(law.a));
  }
}

void validate_stein(const SweepConfig& c) {
  validate_laws(c);
  require(!c.zs.empty(), "z", "at least one z is required");
  for (double z : c.zs) require(std::isfinite(z), "z", "must be finite");
  require(c.grid_points >= 2, "grid", "needs at least 2 points");
}

void validate_sweep(const SweepConfig& c) {
  (void)parse_model(c.model);
  require(!c.ns.empty(), "n", "at least one n is required");
  for (std::size_t i = 0; i < c.ns.size(); ++i) {
    require(c.ns[i] >= 1, "n", "must be positive, got " + std::to_string(c.ns[i]));
    require(i == 0 || c.ns[i - 1] < c.ns[i], "n", "values must be strictly increasing");
  }
  require(!c.ps.empty(), "p", "at least one p is required");
  for (double p : c.ps) require(p >= 0.0 && std::isfinite(p), "p", "must be >= 0, got " + format_double(p));
  require(c.beta > 0.0 && std::isfinite(c.beta), "beta", "must be positive and finite");
  require(c.a_rule == "support-bound" || c.a_rule == "fixed", "a-rule", "expected support-bound or fixed");
  if (c.a_rule == "fixed") {
    require(c.a.has_value(), "a", "a-rule fixed needs a value");
    require(*c.a > 0.0 && std::isfinite(*c.a), "a", "must be positive and finite");
  }
}

std::string join_path(const std::string& out, const std::string& name) {
  const std::filesystem::path path(out);
  std::filesystem::path sibling = path.parent_path() / path.stem();
  sibling += "." + name + ".csv";
  return sibling.string();
}

struct ModelRun {
  std::vector<AuditResult> rows;  // one per p
};

std::vector<ModelRun> audit_jobs(const SweepConfig& c) {
  const Model model = parse_model(c.model);
  const std::optional<double> a = c.a_rule == "fixed" ? c.a : std::nullopt;
  const std::function<ModelRun(std::size_t)> job = [&](std::size_t i) {
    const ModelSnapshot snap = make_snapshot(model, c.ns[i], c.beta);
    ModelRun run;
    for (double p : c.ps) run.rows.push_back(theorem_audit(snap, p, a));
    return run;
  };
  return parallel_map(c.ns.size(), c.threads, job);
}

Table fit_table(const SweepConfig& c, const std::vector<ModelRun>& runs) {
  Table fits{"fits", {"model", "p", "slope", "intercept", "r_squared", "target_slope", "empirical_constant"}, {}};
  if (c.ns.size() < 3) return fits;
  const Model model = parse_model(c.model);
  const double target = model == Model::curie_weiss ? -0.5 : -0.25;
  for (std::size_t j = 0; j < c.ps.size(); ++j) {
    std::vector<double> d;
    for (const auto& run : runs) d.push_back(run.rows[j].profile.supremum);
    if (std::any_of(d.begin(), d.end(), [](double x) { return !(x > 0.0); })) continue;
    const RateFit f = rate_fit(c.ns, d, target);
    fits.rows.push_back({std::string(model_name(model)), c.ps[j], f.slope, f.intercept, f.r_squared, f.target_slope,
                         f.empirical_constant});
  }
  return fits;
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw InvalidParameter("format: expected csv or json, got '" + name + "'");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
              os << format_double(v);
            } else if constexpr (std::is_same_v<V, bool>) {
              os << (v ? "true" : "false");
            } else {
              os << v;
            }
          },
          row[i]);
    }
    os << '\n';
  }
  return os.str();
}

std::string to_json(const std::vector<Table>& tables) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const Table& table : tables) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::visit(
            [&](const auto& v) {
              using V = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<V, double>) {
                obj[table.columns[i]] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json();
              } else {
                obj[table.columns[i]] = v;
              }
            },
            row[i]);
      }
      rows.push_back(std::move(obj));
    }
    doc[table.name] = std::move(rows);
  }
  return doc.dump(2) + "\n";
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  file.close();
  if (!file) throw IoError("failed writing '" + path + "'");
}

void validate(const SweepConfig& config) {
  validate_sweep(config);
  validate_stein(config);
  require(config.max_n >= 2, "max-n", "must be >= 2");
}

RunResult run_limit_law(const SweepConfig& c) {
  validate_laws(c);
  constexpr int kGrid = 800;
  struct Row {
    LimitLaw law;
    std::array<double, 4> moments;
    double margin;
    long violations;
  };
  const std::function<Row(std::size_t)> job = [&](std::size_t i) {
    const LimitLaw law(c.laws[i].k, c.laws[i].a);
    Row row{law, {law.abs_moment(1), law.abs_moment(2), law.abs_moment(4), law.abs_moment(6)}, INFINITY, 0};
    for (int g = 1; g <= kGrid; ++g) {
      const double x = 8.0 * g / kGrid;
      const double margin = law.tail_bound(x) - law.upper_tail(x);
      row.margin = std::min(row.margin, margin);
      if (margin < 0.0) ++row.violations;
    }
    return row;
  };
  const auto rows = parallel_map(c.laws.size(), c.threads, job);

  RunResult out;
  Table t{"limit_law",
          {"k", "a", "b", "moment_1", "moment_2", "moment_4", "moment_6", "tail_bound_min_margin", "tail_bound_violations"},
          {}};
  for (const Row& r : rows) {
    t.rows.push_back({static_cast<long>(r.law.k()), r.law.a(), r.law.b(), r.moments[0], r.moments[1], r.moments[2],
                      r.moments[3], r.margin, r.violations});
    if (r.violations > 0 && out.status == 0) {
      out.status = 2;
      out.message = "tail bound violated for k=" + std::to_string(r.law.k()) + " a=" + format_double(r.law.a());
    }
  }
  out.tables.push_back(std::move(t));
  return out;
}

RunResult run_stein_check(const SweepConfig& c) {
  validate_stein(c);
  struct Row {
    double max_residual = 0.0;
    double min_f = INFINITY;
    double min_log_f = INFINITY;
    double max_f = 0.0;
    double f_bound = 0.0;
    double max_fprime = 0.0;
    long violations = 0;
  };
  const std::size_t jobs = c.laws.size() * c.zs.size();
  const std::function<Row(std::size_t)> job = [&](std::size_t i) {
    const Law& cfg_law = c.laws[i / c.zs.size()];
    const double z = c.zs[i % c.zs.size()];
    const SteinSolution sol(LimitLaw(cfg_law.k, cfg_law.a), z);
    Row row;
    row.f_bound = 1.0 / (2.0 * sol.law().b());
    for (int g = 0; g < c.grid_points; ++g) {
      const double x = -10.0 + 20.0 * g / (c.grid_points - 1);
      if (std::abs(x - z) < 1e-6) continue;
      const double f = sol.f(x);
      const double fp = sol.f_prime(x);
      const double log_f = sol.log_f(x);
      const double res = std::abs(sol.residual(x));
      row.max_residual = std::max(row.max_residual, res);
      row.min_f = std::min(row.min_f, f);
      row.min_log_f = std::min(row.min_log_f, log_f);
      row.max_f = std::max(row.max_f, f);
      row.max_fprime = std::max(row.max_fprime, std::abs(fp));
      if (!(res < 1e-8) || !std::isfinite(log_f) || f > row.f_bound + 1e-12 || std::abs(fp) > 1.0 + 1e-12) ++row.violations;
    }
    return row;
  };
  const auto rows = parallel_map(jobs, c.threads, job);

  RunResult out;
  Table t{"stein_check",
          {"k", "a", "z", "max_abs_residual", "min_f", "min_log_f", "max_f", "f_bound", "max_abs_fprime", "violations"},
          {}};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Law& cfg_law = c.laws[i / c.zs.size()];
    const double z = c.zs[i % c.zs.size()];
    const Row& r = rows[i];
    t.rows.push_back({static_cast<long>(cfg_law.k), cfg_law.a, z, r.max_residual, r.min_f, r.min_log_f, r.max_f, r.f_bound, r.max_fprime,
                      r.violations});
    if (r.violations > 0 && out.status == 0) {
      out.status = 2;
      out.message = "Stein solution bound violated for k=" + std::to_string(cfg_law.k) + " z=" + format_double(z);
    }
  }
  out.tables.push_back(std::move(t));
  return out;
}

RunResult run_audit(const SweepConfig& c) {
  validate_sweep(c);
  const auto runs = audit_jobs(c);
  Table t{"audit", audit_columns(), {}};
  for (const auto& run : runs) {
    for (const AuditResult& r : run.rows) {
      t.rows.push_back({std::string(model_name(r.model)), r.n, r.p, r.profile.supremum, r.profile.argsup,
                        r.terms.term_condvar, r.terms.term_remainder, r.terms.term_a, r.terms.term_a3,
                        r.terms.term_delta4, r.implied_const_rate, r.implied_const_papernorm});
    }
  }
  RunResult out;
  out.tables.push_back(std::move(t));
  out.tables.push_back(fit_table(c, runs));
  return out;
}

RunResult run_rate_fit(const SweepConfig& c) {
  validate_sweep(c);
  require(c.ns.size() >= 3, "n", "rate-fit needs at least 3 values");
  RunResult out;
  out.tables.push_back(fit_table(c, audit_jobs(c)));
  return out;
}

RunResult run_oracle(const SweepConfig& c) {
  require(c.max_n >= 2, "max-n", "must be >= 2");
  std::vector<Model> models;
  if (c.oracle_models.empty()) {
    models.push_back(Model::curie_weiss);
    if (c.max_n <= oracle::kMaxVertices) models.push_back(Model::monomer_dimer);
  } else {
    for (const auto& name : c.oracle_models) {
      if (!name.empty()) models.push_back(parse_model(name));
    }
    require(!models.empty(), "model", "model list is empty");
  }
  const oracle::SuiteReport report = oracle::run_oracle_suite(models, c.max_n);
  RunResult out;
  Table t{"oracle", {"check", "max_error", "passed"}, {}};
  for (const auto& cmp : report.comparisons) t.rows.push_back({cmp.name, cmp.max_error, cmp.passed});
  if (const auto* bad = report.first_failure()) {
    out.status = 3;
    out.message = "oracle mismatch: " + bad->name + " (max error " + format_double(bad->max_error) + ")";
  }
  out.tables.push_back(std::move(t));
  return out;
}

void emit(const SweepConfig& config, const RunResult& result) {
  if (config.format == Format::json) {
    write_output(config.out, to_json(result.tables));
    return;
  }
  for (std::size_t i = 0; i < result.tables.size(); ++i) {
    if (i == 0) {
      write_output(config.out, to_csv(result.tables[i]));
    } else if (!config.out.empty()) {
      write_output(join_path(config.out, result.tables[i].name), to_csv(result.tables[i]));
    }
  }
}

}  // namespace steinbound::sweep
