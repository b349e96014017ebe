#include "ctxcache/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctxcache::evidence {

namespace {
constexpr double kMassSumTolerance = 1e-9;
constexpr double kTotalConflictFloor = 1e-9;
}  // namespace

void MassFunction::validate() const {
  if (cache < 0.0 || evict < 0.0 || theta < 0.0) {
    throw ValidationError("mass function has a negative mass");
  }
  double sum = cache + evict + theta;
  if (std::abs(sum - 1.0) > kMassSumTolerance) {
    throw ValidationError("mass function does not sum to 1");
  }
}

double compute_cf(DurationMs delta_t_ms, double lambda_per_ms) {
  if (delta_t_ms < 0) {
    throw std::invalid_argument("compute_cf: negative elapsed time");
  }
  if (lambda_per_ms < 0.0) {
    throw std::invalid_argument("compute_cf: negative decay rate");
  }
  return std::exp(-lambda_per_ms * static_cast<double>(delta_t_ms));
}

MassFunction assign_masses(double score, double epsilon) {
  if (score < 0.0 || score > 1.0) {
    throw std::invalid_argument("assign_masses: score outside [0,1]");
  }
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("assign_masses: epsilon outside [0,1]");
  }
  MassFunction m;
  m.cache = (1.0 - epsilon) * score;
  m.evict = (1.0 - epsilon) * (1.0 - score);
  m.theta = epsilon;
  return m;
}

CombinedBelief combine_dst(const MassFunction& m1, const MassFunction& m2) {
  m1.validate();
  m2.validate();

  CombinedBelief out;
  // 1. Conflict: mass landing on contradictory singleton pairs.
  out.conflict = m1.cache * m2.evict + m1.evict * m2.cache;

  double denom = 1.0 - out.conflict;
  if (denom < kTotalConflictFloor) {
    out.decidable = false;
    out.mass = MassFunction{};
    return out;
  }

  // 2. Surviving intersections, renormalized. Theta intersected with a
  //    singleton supports that singleton; Theta with Theta stays Theta.
  out.mass.cache = (m1.cache * m2.cache + m1.cache * m2.theta + m1.theta * m2.cache) / denom;
  out.mass.evict = (m1.evict * m2.evict + m1.evict * m2.theta + m1.theta * m2.evict) / denom;
  out.mass.theta = (m1.theta * m2.theta) / denom;
  return out;
}

double combine_weighted(double poa_score, double cf_score, double w_poa) {
  if (w_poa < 0.0 || w_poa > 1.0) {
    throw std::invalid_argument("combine_weighted: weight outside [0,1]");
  }
  return w_poa * poa_score + (1.0 - w_poa) * cf_score;
}

Thresholds compute_thresholds(std::span<const double> cf_scores, double kappa) {
  if (cf_scores.empty()) {
    throw ValidationError("compute_thresholds: no cached scores");
  }
  if (kappa <= 0.0) {
    throw std::invalid_argument("compute_thresholds: kappa must be > 0");
  }
  double mean = 0.0;
  for (double s : cf_scores) mean += s;
  mean /= static_cast<double>(cf_scores.size());

  double var = 0.0;
  for (double s : cf_scores) var += (s - mean) * (s - mean);
  var /= static_cast<double>(cf_scores.size());
  double sigma = std::sqrt(var);

  auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };
  Thresholds t;
  t.update = clamp01(mean - kappa * sigma);
  t.evict = clamp01(mean - 2.0 * kappa * sigma);
  return t;
}

}  // namespace ctxcache::evidence
