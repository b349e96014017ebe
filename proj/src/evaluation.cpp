#include "ctxcache/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctxcache::eval {

namespace {
constexpr double kWeightSumTolerance = 1e-9;
constexpr double kReciprocalTolerance = 1e-9;
constexpr double kPowerIterTolerance = 1e-10;
constexpr std::size_t kPowerIterMax = 10000;

// Standard random-index table (Saaty), indexed by matrix size 1..10. Larger
// matrices reuse the last entry; sizes above 10 are unusual for pairwise
// comparison and the CR is only advisory.
constexpr double kRandomIndex[] = {0.0, 0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49};
}  // namespace

void WeightVector::validate() const {
  if (w.empty()) throw ValidationError("weight vector is empty");
  double sum = 0.0;
  for (double x : w) {
    if (x < 0.0) throw ValidationError("weight vector has a negative weight");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw ValidationError("weight vector does not sum to 1");
  }
}

AhpMatrix::AhpMatrix(std::vector<std::vector<double>> a) : a_(std::move(a)) {
  std::size_t n = a_.size();
  if (n == 0) throw ValidationError("pairwise matrix is empty");
  for (std::size_t i = 0; i < n; ++i) {
    if (a_[i].size() != n) throw ValidationError("pairwise matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(a_[i][j] > 0.0) || !std::isfinite(a_[i][j])) {
        throw ValidationError("pairwise matrix entries must be positive and finite");
      }
    }
    if (std::abs(a_[i][i] - 1.0) > kReciprocalTolerance) {
      throw ValidationError("pairwise matrix diagonal must be 1");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(a_[i][j] * a_[j][i] - 1.0) > kReciprocalTolerance) {
        throw ValidationError("pairwise matrix is not reciprocal");
      }
    }
  }
}

AhpMatrix AhpMatrix::from_priorities(std::span<const double> v) {
  if (v.empty()) throw ValidationError("priority vector is empty");
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ValidationError("priority vector entries must be positive and finite");
    }
  }
  std::size_t n = v.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = v[i] / v[j];
  }
  return AhpMatrix(std::move(a));
}

AhpResult ahp_weights(const AhpMatrix& m) {
  std::size_t n = m.size();
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  std::vector<double> y(n, 0.0);

  AhpResult res;
  for (res.iterations = 1; res.iterations <= kPowerIterMax; ++res.iterations) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += m.at(i, j) * x[j];
      y[i] = s;
    }
    double norm = 0.0;
    for (double v : y) norm += v;
    // With x L1-normalized, the L1 norm of A*x is the Rayleigh-style
    // eigenvalue estimate for the (positive) principal eigenvector.
    res.lambda_max = norm;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] /= norm;
      change += std::abs(y[i] - x[i]);
    }
    x = y;
    if (change < kPowerIterTolerance) break;
  }
  res.iterations = std::min(res.iterations, kPowerIterMax);

  if (n <= 2) {
    res.consistency_ratio = 0.0;  // reciprocal 1x1/2x2 matrices are always consistent
  } else {
    double ri = n < std::size(kRandomIndex) ? kRandomIndex[n]
                                            : kRandomIndex[std::size(kRandomIndex) - 1];
    double ci = (res.lambda_max - static_cast<double>(n)) / static_cast<double>(n - 1);
    res.consistency_ratio = std::max(0.0, ci / ri);
  }
  res.weights.w = std::move(x);
  return res;
}

double sub_utility(double raw, const UtilityFactorSpec& spec) {
  if (!(spec.max > spec.min)) return 0.5;  // degenerate range cannot discriminate
  double u = (raw - spec.min) / (spec.max - spec.min);
  u = std::clamp(u, 0.0, 1.0);
  return spec.cost ? 1.0 - u : u;
}

double weighted_utility(std::span<const double> sub_utilities, const WeightVector& weights) {
  weights.validate();
  if (sub_utilities.size() != weights.size()) {
    throw ValidationError("utility/weight dimension mismatch");
  }
  double u = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) u += weights.w[j] * sub_utilities[j];
  return u;
}

double compute_utility(std::span<const double> raw,
                       std::span<const UtilityFactorSpec> specs,
                       const WeightVector& weights) {
  if (raw.size() != specs.size()) {
    throw ValidationError("raw-score/range dimension mismatch");
  }
  std::vector<double> sub(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) sub[j] = sub_utility(raw[j], specs[j]);
  return weighted_utility(sub, weights);
}

FactorSpecs default_factor_specs() {
  FactorSpecs s;
  s[kFactorPoa] = {0.0, 0.01, false};  // raw PoA saturates at 1% of total demand
  s[kFactorQos] = {0.5, 1.0, false};
  s[kFactorCoc] = {1.0, 10.0, true};  // cost: cheaper context is better
  s[kFactorQoc] = {0.5, 1.0, false};
  s[kFactorSla] = {1.0, 5.0, false};
  s[kFactorTimeliness] = {0.0, 1.0, false};
  s[kFactorProviderType] = {0.0, 1.0, false};
  return s;
}

std::array<double, kFactorCount> default_factor_priorities() {
  return {0.25, 0.15, 0.10, 0.15, 0.10, 0.15, 0.10};
}

void AccessStats::validate() const {
  if (recent > window_total) {
    throw ValidationError("recent count exceeds window total");
  }
}

double compute_poa(const AccessStats& stats, std::uint64_t total_historical, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("compute_poa: alpha outside [0,1]");
  }
  stats.validate();
  double hist_term = total_historical > 0
                         ? alpha * static_cast<double>(stats.historical) /
                               static_cast<double>(total_historical)
                         : 0.0;
  double recent_term = stats.window_total > 0
                           ? (1.0 - alpha) * static_cast<double>(stats.recent) /
                                 static_cast<double>(stats.window_total)
                           : 0.0;
  return hist_term + recent_term;
}

std::vector<PriorityEntry> prioritize(std::vector<ItemScore> items, double beta) {
  if (beta < 0.0 || beta > 1.0) {
    throw std::invalid_argument("prioritize: beta outside [0,1]");
  }
  std::vector<PriorityEntry> out;
  out.reserve(items.size());
  for (const ItemScore& it : items) {
    out.push_back({it.id, beta * it.utility + (1.0 - beta) * it.poa});
  }
  std::sort(out.begin(), out.end(), [](const PriorityEntry& a, const PriorityEntry& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.id < b.id;
  });
  return out;
}

}  // namespace ctxcache::eval
