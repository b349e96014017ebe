#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctxcache/types.hpp"

namespace ctxcache::eval {

// Non-negative weights summing to 1.
struct WeightVector {
  std::vector<double> w;

  void validate() const;  // throws ValidationError
  std::size_t size() const { return w.size(); }
};

// Square reciprocal pairwise-comparison matrix: a_ij > 0, a_ii == 1,
// a_ji == 1/a_ij (within 1e-9 relative).
class AhpMatrix {
 public:
  explicit AhpMatrix(std::vector<std::vector<double>> a);

  // Perfectly consistent matrix induced by a positive priority vector:
  // a_ij = v_i / v_j.
  static AhpMatrix from_priorities(std::span<const double> v);

  std::size_t size() const { return a_.size(); }
  double at(std::size_t i, std::size_t j) const { return a_[i][j]; }

 private:
  std::vector<std::vector<double>> a_;
};

struct AhpResult {
  WeightVector weights;
  double lambda_max = 0.0;
  double consistency_ratio = 0.0;  // callers should warn (not fail) above 0.1
  std::size_t iterations = 0;
};

// Principal eigenvector by power iteration (L1-normalized), stopping when the
// L1 change drops below 1e-10 or after 10,000 iterations. The consistency
// ratio is (lambda_max - m) / ((m - 1) * RI(m)) with the standard random
// index table; m <= 2 is always consistent (CR = 0).
AhpResult ahp_weights(const AhpMatrix& m);

// Declared normalization range for one utility attribute. Cost-type
// attributes ("smaller is better") are inverted after normalization.
struct UtilityFactorSpec {
  double min = 0.0;
  double max = 1.0;
  bool cost = false;
};

// clamp((raw - min) / (max - min), 0, 1), inverted for cost attributes.
// A degenerate range (max <= min) cannot discriminate and maps to the
// neutral sub-utility 0.5.
double sub_utility(double raw, const UtilityFactorSpec& spec);

// Weighted additive aggregation of already-normalized sub-utilities:
// U = sum_j w_j * u_j. Sizes must match.
double weighted_utility(std::span<const double> sub_utilities, const WeightVector& weights);

// Full multi-attribute utility from raw scores: normalize each raw score by
// its declared range, then aggregate.
double compute_utility(std::span<const double> raw,
                       std::span<const UtilityFactorSpec> specs,
                       const WeightVector& weights);

// The fixed utility-attribute set used for cache scoring. PoA is filled in
// live from access statistics; the rest are static per-target scores from
// the corpus.
enum Factor : std::size_t {
  kFactorPoa = 0,
  kFactorQos,
  kFactorCoc,  // cost of context (cost-type: cheaper is better)
  kFactorQoc,
  kFactorSla,
  kFactorTimeliness,
  kFactorProviderType,
  kFactorCount,
};

using FactorArray = std::array<double, kFactorCount>;
using FactorSpecs = std::array<UtilityFactorSpec, kFactorCount>;

FactorSpecs default_factor_specs();

// Default importance vector over the factor set; scenario presets override
// it. Feeding this through ahp_weights yields the default MAUT weights.
std::array<double, kFactorCount> default_factor_priorities();

// Access counters for one target: all-time count, count within the recent
// window, and the window-wide event total N (all targets).
struct AccessStats {
  std::uint64_t historical = 0;
  std::uint64_t recent = 0;
  std::uint64_t window_total = 0;

  void validate() const;  // recent <= window_total
};

// Probability of access: alpha * h_i / total_historical + (1 - alpha) *
// q_i / N. A zero denominator zeroes that term (no evidence contributes no
// probability).
double compute_poa(const AccessStats& stats, std::uint64_t total_historical, double alpha);

// One scored target for prioritization.
struct ItemScore {
  std::string id;
  double utility = 0.0;
  double poa = 0.0;
};

struct PriorityEntry {
  std::string id;
  double priority = 0.0;
};

// priority = beta * utility + (1 - beta) * poa, sorted descending; equal
// priorities are ordered by id ascending so the output is deterministic.
std::vector<PriorityEntry> prioritize(std::vector<ItemScore> items, double beta);

}  // namespace ctxcache::eval
