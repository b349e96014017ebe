#pragma once

#include <span>

#include "ctxcache/types.hpp"

namespace ctxcache::evidence {

// Basic probability assignment over the frame {Cache, Evict}. The three
// focal elements are the two singletons and the full frame Theta (explicit
// uncertainty mass).
struct MassFunction {
  double cache = 0.0;
  double evict = 0.0;
  double theta = 0.0;

  // Throws ValidationError unless all masses are >= 0 and sum to 1 within 1e-9.
  void validate() const;
};

// Result of combining two mass functions. When the sources are in total
// conflict (normalizer 1-K below 1e-9) the combination is undefined;
// `decidable` is false and callers must treat the entry conservatively
// (the cache layer maps it to a refresh).
struct CombinedBelief {
  MassFunction mass;
  double conflict = 0.0;  // K, the mass assigned to contradictory pairs
  bool decidable = true;
};

// Decision thresholds derived from the freshness statistics of the cached
// population: update = mean - kappa*stddev, evict = mean - 2*kappa*stddev,
// both clamped to [0, 1]. evict <= update always holds.
struct Thresholds {
  double update = 0.0;
  double evict = 0.0;
};

// Context freshness: exponential decay e^(-lambda * delta_t) of confidence in
// a value that was refreshed delta_t milliseconds ago. lambda is per
// millisecond. Negative inputs throw std::invalid_argument. lambda == 0
// models a value that never goes stale (CF stays exactly 1).
double compute_cf(DurationMs delta_t_ms, double lambda_per_ms);

// Maps a scalar score in [0, 1] to a mass function: mass(Cache) =
// (1-epsilon)*score, mass(Evict) = (1-epsilon)*(1-score), mass(Theta) =
// epsilon. epsilon reserves explicit uncertainty; the default 0 reproduces
// the two-singleton form used by the combination worked examples.
MassFunction assign_masses(double score, double epsilon = 0.0);

// Dempster's rule of combination on the {Cache, Evict} frame. Conflict
// K = m1(C)m2(E) + m1(E)m2(C); the surviving products are renormalized by
// 1-K. Commutative; theta masses propagate into both singletons.
CombinedBelief combine_dst(const MassFunction& m1, const MassFunction& m2);

// Linear opinion pool alternative to the DST rule, selectable via config:
// belief(Cache) = w_poa * poa_score + (1 - w_poa) * cf_score.
double combine_weighted(double poa_score, double cf_score, double w_poa);

// Population mean/stddev of the cached items' CF scores define the decision
// thresholds. Throws ValidationError on an empty span, std::invalid_argument
// on kappa <= 0. A single score is legal and degenerates to update == evict
// == that score (sigma = 0).
Thresholds compute_thresholds(std::span<const double> cf_scores, double kappa);

enum class CombineRule { kDst, kWeightedSum };

}  // namespace ctxcache::evidence
