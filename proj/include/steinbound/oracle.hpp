#pragma once

// Brute-force references for small systems. Nothing here shares code with the
// aggregated model implementations: Curie-Weiss runs over all 2^n spin
// configurations with the pairwise energy, and the monomer-dimer oracle
// enumerates every matching of K_n.

#include <cstdint>
#include <string>
#include <vector>

#include "steinbound/metrics.hpp"

namespace steinbound::oracle {

inline constexpr long kMaxSpins = 14;
inline constexpr long kMaxVertices = 10;

/// Per value of the magnetization (ascending), from enumeration.
struct EnumeratedPair {
  std::vector<double> w;
  std::vector<double> prob;
  std::vector<double> e_delta;
  std::vector<double> e_delta2;
  std::vector<double> e_delta4;
  std::vector<double> up;    // P(next atom up | atom)
  std::vector<double> down;  // P(next atom down | atom)
  std::vector<double> psi_w;
  // Truncated moments E(Delta^m 1(|Delta| > a) | w) for the a given below.
  std::vector<double> e_delta2_above;
  std::vector<double> e_delta4_above;
  double a = 0.0;
  double jump = 0.0;
  double lambda = 0.0;
};

/// a <= 0 selects the jump size 2 / n^(3/4).
EnumeratedPair enumerate_curie_weiss(long n, double beta = 1.0, double a = 0.0);
EnumeratedPair enumerate_monomer_dimer(long n, double a = 0.0);

/// Number of perfect matchings of K_v by recursive enumeration.
std::uint64_t count_perfect_matchings(int v);

/// Bound terms computed with plain loops from an enumeration at its own a.
BoundReport enumerated_bound_terms(const EnumeratedPair& e);

struct Comparison {
  std::string name;  // e.g. "curie-weiss n=6 e_delta2"
  double max_error = 0.0;
  bool passed = false;
};

struct SuiteReport {
  std::vector<Comparison> comparisons;
  bool passed() const noexcept;
  /// nullptr when everything passed.
  const Comparison* first_failure() const noexcept;
};

/// Compares every library quantity against enumeration for n = 2..max_n.
/// Throws InvalidParameter for an empty model list, max_n < 2, max_n > 14,
/// or max_n > 10 with monomer-dimer in the list.
SuiteReport run_oracle_suite(const std::vector<Model>& models, long max_n, double tolerance = 1e-12);

}  // namespace steinbound::oracle
