// steinbound: batch front-end for the limit-law, Stein-solution, audit,
// oracle and rate-fit runs.
//
// Exit codes: 0 success, 1 validation error, 2 bound violation,
// 3 numeric-consistency failure.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "steinbound/errors.hpp"
#include "steinbound/sweep.hpp"

namespace sb = steinbound;
namespace sw = steinbound::sweep;

namespace {

struct Raw {
  std::string format = "csv";
  std::string out;
  std::string threads = "1";
  std::vector<int> ks;
  std::vector<double> aks;
  std::string model = "curie-weiss";
  std::vector<std::string> models;
  std::vector<long> ns;
  std::vector<double> ps;
  double beta = 1.0;
  std::optional<double> a;
  std::string a_rule;
  std::vector<double> zs;
  int grid = 200;
  long max_n = 10;
};

void add_common(CLI::App* cmd, Raw& raw) {
  cmd->add_option("--format", raw.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", raw.out, "output path (default stdout)");
  cmd->add_option("--threads", raw.threads, "worker count or 'auto'");
}

void add_laws(CLI::App* cmd, Raw& raw) {
  cmd->add_option("--k", raw.ks, "limit-law order k (repeatable, paired with --ak)");
  cmd->add_option("--ak", raw.aks, "limit-law scale a_k (repeatable)");
}

void add_sweep(CLI::App* cmd, Raw& raw) {
  cmd->add_option("--model", raw.model, "curie-weiss or monomer-dimer");
  cmd->add_option("--n", raw.ns, "system sizes (repeatable, increasing)");
  cmd->add_option("--p", raw.ps, "weight exponents (repeatable)");
  cmd->add_option("--beta", raw.beta, "inverse temperature (curie-weiss)");
  cmd->add_option("--a", raw.a, "fixed truncation level (implies --a-rule fixed)");
  cmd->add_option("--a-rule", raw.a_rule, "support-bound or fixed");
}

unsigned parse_threads(const std::string& text) {
  if (text == "auto") return 0;
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || value < 1 || value > 4096) {
    throw sb::InvalidParameter("threads: expected a positive integer or 'auto', got '" + text + "'");
  }
  return static_cast<unsigned>(value);
}

sw::SweepConfig build_config(const Raw& raw) {
  sw::SweepConfig c;
  c.format = sw::parse_format(raw.format);
  c.out = raw.out;
  c.threads = parse_threads(raw.threads);
  if (!raw.ks.empty() || !raw.aks.empty()) {
    if (raw.ks.size() != raw.aks.size()) {
      throw sb::InvalidParameter("ak: give one --ak per --k (got " + std::to_string(raw.ks.size()) + " k and " +
                                 std::to_string(raw.aks.size()) + " a_k)");
    }
    c.laws.clear();
    for (std::size_t i = 0; i < raw.ks.size(); ++i) c.laws.push_back({raw.ks[i], raw.aks[i]});
  }
  c.model = raw.model;
  if (!raw.ns.empty()) c.ns = raw.ns;
  if (!raw.ps.empty()) c.ps = raw.ps;
  c.beta = raw.beta;
  c.a = raw.a;
  c.a_rule = !raw.a_rule.empty() ? raw.a_rule : (raw.a ? "fixed" : "support-bound");
  if (!raw.zs.empty()) c.zs = raw.zs;
  c.grid_points = raw.grid;
  c.max_n = raw.max_n;
  c.oracle_models = raw.models;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact finite-n laws, Stein solutions and non-uniform Berry-Esseen audits", "steinbound"};
  app.set_config("--config", "", "INI/TOML file; [subcommand] sections, flags override it");
  app.require_subcommand(1);

  Raw raw;
  auto* limit = app.add_subcommand("limit-law", "normalizers, moments and tail-bound margins");
  add_common(limit, raw);
  add_laws(limit, raw);

  auto* stein = app.add_subcommand("stein-check", "Stein-equation residuals and solution bounds");
  add_common(stein, raw);
  add_laws(stein, raw);
  stein->add_option("--z", raw.zs, "threshold z (repeatable)");
  stein->add_option("--grid", raw.grid, "grid points on [-10, 10]");

  auto* audit = app.add_subcommand("audit", "weighted distances, bound terms and implied constants");
  add_common(audit, raw);
  add_sweep(audit, raw);

  auto* fit = app.add_subcommand("rate-fit", "log-log slope of the distance over n, per p");
  add_common(fit, raw);
  add_sweep(fit, raw);

  auto* oracle = app.add_subcommand("oracle", "brute-force enumeration checks");
  add_common(oracle, raw);
  oracle->add_option("--model", raw.models, "models to check (repeatable; default all allowed by --max-n)");
  oracle->add_option("--max-n", raw.max_n, "largest system size (<= 14 spins, <= 10 dimers)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const sw::SweepConfig config = build_config(raw);
    sw::RunResult result;
    if (limit->parsed()) {
      result = sw::run_limit_law(config);
    } else if (stein->parsed()) {
      result = sw::run_stein_check(config);
    } else if (audit->parsed()) {
      result = sw::run_audit(config);
    } else if (fit->parsed()) {
      result = sw::run_rate_fit(config);
    } else {
      result = sw::run_oracle(config);
    }
    sw::emit(config, result);
    if (result.status != 0) std::cerr << "steinbound: " << result.message << '\n';
    return result.status;
  } catch (const sb::NumericConsistencyError& e) {
    std::cerr << "steinbound: numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "steinbound: invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "steinbound: invalid input: " << e.what() << '\n';
    return 1;
  } catch (const std::length_error& e) {
    std::cerr << "steinbound: too large: " << e.what() << '\n';
    return 1;
  } catch (const sb::IoError& e) {
    std::cerr << "steinbound: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "steinbound: numeric failure: " << e.what() << '\n';
    return 3;
  }
}
