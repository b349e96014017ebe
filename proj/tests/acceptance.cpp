// Acceptance gate for the library and harness. Each criterion prints exactly
// one line ("A<n> PASS - ..." or "A<n> FAIL - ...") with the measured values
// and pinned tolerances; the process exit code is the number of failures.
// argv[1] must be the path to the command-line binary (used by A7).

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ctxcache/cache_core.hpp"
#include "ctxcache/config.hpp"
#include "ctxcache/context_model.hpp"
#include "ctxcache/evaluation.hpp"
#include "ctxcache/evidence.hpp"
#include "ctxcache/policies.hpp"
#include "ctxcache/rng.hpp"
#include "ctxcache/simulator.hpp"
#include "ctxcache/types.hpp"
#include "ctxcache/workload.hpp"

namespace cc = ctxcache;
namespace fs = std::filesystem;

namespace {

std::string g_cli;  // command-line binary, from argv[1]

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(double v, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---- A1: evidence combination closed forms -----------------------------------------

bool a1(std::string& detail) {
  Stopwatch clock;
  double max_err = 0.0;
  auto track = [&](double got, double want) {
    max_err = std::max(max_err, std::abs(got - want));
  };

  // Worked example: scores 0.8 and 0.3 must renormalize to 0.24/0.38 and
  // 0.14/0.38 with conflict 0.62.
  cc::evidence::CombinedBelief ex = cc::evidence::combine_dst(
      cc::evidence::assign_masses(0.8), cc::evidence::assign_masses(0.3));
  if (!ex.decidable) {
    detail = "worked example reported as total conflict";
    return false;
  }
  track(ex.mass.cache, 0.24 / 0.38);
  track(ex.mass.evict, 0.14 / 0.38);
  track(ex.conflict, 0.62);

  // Full grid of score pairs with no reserved uncertainty: the combination
  // must equal the two-singleton closed forms, and masses must stay a
  // probability assignment.
  std::size_t cells = 0;
  std::size_t undecidable = 0;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double p = i / 99.0;
      const double c = j / 99.0;
      cc::evidence::CombinedBelief r = cc::evidence::combine_dst(
          cc::evidence::assign_masses(p), cc::evidence::assign_masses(c));
      const double conflict = p * (1.0 - c) + (1.0 - p) * c;
      track(r.conflict, conflict);
      if (1.0 - conflict < 1e-9) {
        if (r.decidable) {
          detail = "total conflict at (" + fmt(p) + ", " + fmt(c) + ") not flagged";
          return false;
        }
        ++undecidable;
        continue;
      }
      if (!r.decidable) {
        detail = "combination at (" + fmt(p) + ", " + fmt(c) + ") wrongly undecidable";
        return false;
      }
      track(r.mass.cache, p * c / (1.0 - conflict));
      track(r.mass.evict, (1.0 - p) * (1.0 - c) / (1.0 - conflict));
      track(r.mass.cache + r.mass.evict + r.mass.theta, 1.0);
      ++cells;
    }
  }

  const double elapsed = clock.seconds();
  detail = "worked example and 100x100 score grid (" + std::to_string(cells) +
           " cells, " + std::to_string(undecidable) +
           " total-conflict corners) match closed forms, max |err| " + fmt(max_err) +
           " (tol 1e-12), " + fmt(elapsed, "%.2f") + " s (limit 1)";
  return max_err <= 1e-12 && elapsed < 1.0;
}

// ---- A2: scoring kernels vs independent oracles -------------------------------------

bool a2(std::string& detail) {
  cc::Rng rng(0xacce5501);
  double max_err = 0.0;
  std::size_t inputs = 0;
  auto track = [&](double got, double want) {
    max_err = std::max(max_err, std::abs(got - want));
    ++inputs;
  };

  // Access probability: blended historical / recent-window frequencies with
  // zero denominators contributing nothing.
  for (int n = 0; n < 1200; ++n) {
    cc::eval::AccessStats s;
    std::uint64_t total_hist = 0;
    if (rng.uniform01() < 0.1) {
      s.historical = 0;  // no history at all
    } else {
      s.historical = rng.uniform_index(50);
      total_hist = s.historical + rng.uniform_index(100);
    }
    if (rng.uniform01() < 0.1) {
      s.recent = 0;
      s.window_total = 0;
    } else {
      s.recent = rng.uniform_index(30);
      s.window_total = s.recent + rng.uniform_index(60);
    }
    const double alpha = rng.uniform01();
    double want = 0.0;
    if (total_hist > 0)
      want += alpha * static_cast<double>(s.historical) / static_cast<double>(total_hist);
    if (s.window_total > 0)
      want += (1.0 - alpha) * static_cast<double>(s.recent) /
              static_cast<double>(s.window_total);
    track(cc::eval::compute_poa(s, total_hist, alpha), want);
  }

  // Multi-attribute utility: range normalization (inverted for cost-type
  // attributes, neutral 0.5 on degenerate ranges) then a weighted sum.
  for (int n = 0; n < 1200; ++n) {
    const std::size_t m = cc::eval::kFactorCount;
    std::vector<double> raw(m), lo(m), hi(m), w(m);
    std::vector<bool> cost(m);
    double wsum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      raw[j] = rng.uniform(-0.5, 1.5);
      lo[j] = rng.uniform(0.0, 1.0);
      hi[j] = lo[j] + rng.uniform(-0.2, 1.0);  // sometimes degenerate
      cost[j] = rng.bernoulli(0.3);
      w[j] = rng.uniform(0.05, 1.0);
      wsum += w[j];
    }
    cc::eval::FactorSpecs specs;
    cc::eval::WeightVector weights;
    weights.w.resize(m);
    double want = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      specs[j] = {lo[j], hi[j], cost[j]};
      weights.w[j] = w[j] / wsum;
      double u = 0.5;
      if (hi[j] > lo[j]) u = std::clamp((raw[j] - lo[j]) / (hi[j] - lo[j]), 0.0, 1.0);
      if (cost[j]) u = 1.0 - u;
      want += weights.w[j] * u;
    }
    track(cc::eval::compute_utility(raw, specs, weights), want);
  }

  // Priority ranking: beta-blend of utility and access probability, ordered
  // descending with ascending-id ties.
  for (int batch = 0; batch < 80; ++batch) {
    const std::size_t m = 5 + rng.uniform_index(20);
    const double beta = rng.uniform01();
    std::vector<cc::eval::ItemScore> items(m);
    for (std::size_t j = 0; j < m; ++j) {
      char id[24];
      std::snprintf(id, sizeof id, "t%02zu", j);
      items[j] = {id, rng.uniform01(), rng.uniform01()};
    }
    items[1].utility = items[0].utility;  // force an exact tie
    items[1].poa = items[0].poa;
    struct Want {
      std::string id;
      double priority;
    };
    std::vector<Want> want(m);
    for (std::size_t j = 0; j < m; ++j) {
      want[j] = {items[j].id, beta * items[j].utility + (1.0 - beta) * items[j].poa};
    }
    std::sort(want.begin(), want.end(), [](const Want& a, const Want& b) {
      if (a.priority != b.priority) return a.priority > b.priority;
      return a.id < b.id;
    });
    std::vector<cc::eval::PriorityEntry> got = cc::eval::prioritize(items, beta);
    if (got.size() != m) {
      detail = "priority ranking dropped entries";
      return false;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (got[j].id != want[j].id) {
        detail = "priority ranking order diverges from oracle (batch " +
                 std::to_string(batch) + ", rank " + std::to_string(j) + ")";
        return false;
      }
      track(got[j].priority, want[j].priority);
    }
  }

  // Freshness decay, including the semigroup property
  // decay(t1 + t2) == decay(t1) * decay(t2).
  for (int n = 0; n < 1200; ++n) {
    const double lambda = rng.uniform01() < 0.1 ? 0.0 : rng.uniform(1e-9, 1e-2);
    const cc::DurationMs t1 = static_cast<cc::DurationMs>(rng.uniform_index(5'000'000));
    const cc::DurationMs t2 = static_cast<cc::DurationMs>(rng.uniform_index(5'000'000));
    track(cc::evidence::compute_cf(t1, lambda), std::exp(-lambda * static_cast<double>(t1)));
    track(cc::evidence::compute_cf(t1 + t2, lambda),
          cc::evidence::compute_cf(t1, lambda) * cc::evidence::compute_cf(t2, lambda));
  }

  // Adaptive thresholds: population mean/stddev with clamping to [0, 1].
  for (int n = 0; n < 1000; ++n) {
    const std::size_t m = 1 + rng.uniform_index(40);
    std::vector<double> scores(m);
    for (double& s : scores) s = rng.uniform01();
    const double kappa = rng.uniform(0.01, 2.0);
    const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) /
                        static_cast<double>(m);
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    const double sigma = std::sqrt(var / static_cast<double>(m));
    cc::evidence::Thresholds th = cc::evidence::compute_thresholds(scores, kappa);
    track(th.update, std::clamp(mean - kappa * sigma, 0.0, 1.0));
    track(th.evict, std::clamp(mean - 2.0 * kappa * sigma, 0.0, 1.0));
  }

  // Bandit utilities: the two-factor blend and the four-factor weighted form.
  for (int n = 0; n < 1000; ++n) {
    const double alpha = rng.uniform01();
    const double pop = rng.uniform01();
    const double rate = rng.uniform01();
    track(cc::policy::mcac_utility_original(pop, rate, alpha),
          alpha * pop + (1.0 - alpha) * rate);

    double v[4] = {rng.uniform01(), rng.uniform01(), rng.uniform01(), rng.uniform01()};
    double w[4];
    double wsum = 0.0;
    for (double& x : w) {
      x = rng.uniform(0.05, 1.0);
      wsum += x;
    }
    cc::eval::WeightVector weights;
    double want = 0.0;
    for (int j = 0; j < 4; ++j) {
      weights.w.push_back(w[j] / wsum);
      want += (w[j] / wsum) * v[j];
    }
    track(cc::policy::mcac_utility_adapted(v[0], v[1], v[2], v[3], weights), want);
  }

  detail = "6 kernel families match independent oracles on " + std::to_string(inputs) +
           " random inputs, max |err| " + fmt(max_err) + " (tol 1e-12)";
  return max_err <= 1e-12;
}

// ---- A3: pairwise-comparison weight recovery ----------------------------------------

bool a3(std::string& detail) {
  Stopwatch clock;
  cc::Rng rng(0xacce5503);
  double max_err = 0.0;
  double max_cr = 0.0;
  for (int n = 0; n < 120; ++n) {
    const std::size_t m = 3 + n % 7;  // sizes 3..9
    std::vector<double> v(m);
    double sum = 0.0;
    for (double& x : v) {
      x = rng.uniform(0.1, 10.0);
      sum += x;
    }
    for (double& x : v) x /= sum;
    cc::eval::AhpResult res = cc::eval::ahp_weights(cc::eval::AhpMatrix::from_priorities(v));
    for (std::size_t j = 0; j < m; ++j) {
      max_err = std::max(max_err, std::abs(res.weights.w[j] - v[j]));
    }
    max_cr = std::max(max_cr, res.consistency_ratio);
  }

  cc::eval::AhpResult ones = cc::eval::ahp_weights(
      cc::eval::AhpMatrix(std::vector<std::vector<double>>(5, std::vector<double>(5, 1.0))));
  double ones_err = 0.0;
  for (double w : ones.weights.w) ones_err = std::max(ones_err, std::abs(w - 0.2));

  const double elapsed = clock.seconds();
  detail = "120 consistent matrices (sizes 3-9) recover their priority vectors, max |err| " +
           fmt(max_err) + " (tol 1e-6), max CR " + fmt(max_cr) +
           " (tol 1e-6); all-ones matrix uniform within " + fmt(ones_err) + ", CR " +
           fmt(ones.consistency_ratio) + "; " + fmt(elapsed, "%.2f") + " s (limit 1)";
  return max_err <= 1e-6 && max_cr < 1e-6 && ones_err <= 1e-12 &&
         ones.consistency_ratio <= 1e-12 && elapsed < 1.0;
}

// ---- A4: ratio conservation + cold-cache closed form --------------------------------

bool a4(std::string& detail) {
  double max_dev = 0.0;
  for (int preset = 1; preset <= 4; ++preset) {
    const cc::config::RunConfig& cfg = cc::config::scenario_preset(preset).config;
    cc::context::Corpus corpus = cc::config::materialize_corpus(cfg, std::nullopt, cfg.seed);
    cc::workload::Trace trace =
        cc::config::materialize_trace(cfg, corpus, std::nullopt, std::nullopt, cfg.seed);
    cc::policy::PolicyParams params = cfg.resolved_params();
    for (const std::string& name : cc::policy::known_policies()) {
      cc::sim::RunInputs in;
      in.corpus = &corpus;
      in.trace = &trace;
      in.policy = name;
      in.params = params;
      in.latency = cfg.latency;
      in.sweep_interval_ms = cfg.sweep_interval_ms;
      in.seed = cc::derive_seed(cfg.seed, "a4/" + name);
      cc::sim::MetricsReport m = cc::sim::run(in).metrics;
      if (m.q_total == 0) {
        detail = "preset " + std::to_string(preset) + " produced an empty trace";
        return false;
      }
      max_dev = std::max(max_dev, std::abs(m.chr_pct + m.cmr_pct + m.cer_pct - 100.0));
    }
  }

  // Cold-cache closed form: everything fits and nothing ever goes stale, so
  // the only misses are each target's first query.
  cc::context::Corpus never_stale;
  for (int i = 0; i < 10; ++i) {
    cc::context::ContextAttribute a;
    a.def.id = "t" + std::to_string(i);
    a.def.kind = cc::context::ValueKind::kNumber;
    a.value = 1.0;
    a.validity_lifetime_ms = 1'000'000'000'000;
    a.decay_lambda_per_ms = 0.0;
    never_stale.add_attribute(std::move(a));
  }
  never_stale.finalize();
  cc::workload::Trace round_robin;
  for (std::uint64_t j = 0; j < 600; ++j) {
    round_robin.events.push_back(
        {j, static_cast<cc::TimeMs>(j * 1000), false, "t" + std::to_string(j % 10), "c0"});
  }
  for (const std::string& name : cc::policy::known_policies()) {
    cc::sim::RunInputs in;
    in.corpus = &never_stale;
    in.trace = &round_robin;
    in.policy = name;
    in.params.capacity_units = 32;
    in.seed = cc::derive_seed(4, "a4/cold/" + name);
    cc::sim::MetricsReport m = cc::sim::run(in).metrics;
    if (m.q_miss != 10 || m.q_expired != 0 || m.q_cache != 590) {
      detail = "cold cache with policy " + name + ": misses " + std::to_string(m.q_miss) +
               " (want 10), expired " + std::to_string(m.q_expired) + " (want 0)";
      return false;
    }
  }

  detail = "chr+cmr+cer = 100 within " + fmt(max_dev) +
           " (tol 1e-6) across 6 policies x 4 presets; cold cache: misses == 10 distinct "
           "targets, 0 expired, for all 6 policies";
  return max_dev <= 1e-6;
}

// ---- A5: headline trends on the seeded daily workload -------------------------------

bool a5(std::string& detail) {
  Stopwatch clock;
  const cc::config::RunConfig& cfg = cc::config::scenario_preset(1).config;
  const std::vector<std::string> policies = {"dcmf", "mmyopic", "mgreedy", "mcac"};
  std::map<std::string, double> chr, cer;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cc::context::Corpus corpus = cc::config::materialize_corpus(cfg, std::nullopt, seed);
    cc::workload::Trace trace =
        cc::config::materialize_trace(cfg, corpus, std::nullopt, std::nullopt, seed);
    for (const std::string& name : policies) {
      cc::sim::RunInputs in;
      in.corpus = &corpus;
      in.trace = &trace;
      in.policy = name;
      in.params = cfg.resolved_params();
      in.params.capacity_units = 500;
      in.latency = cfg.latency;
      in.sweep_interval_ms = cfg.sweep_interval_ms;
      in.seed = cc::derive_seed(seed, name);
      cc::sim::MetricsReport m = cc::sim::run(in).metrics;
      chr[name] += m.chr_pct / 5.0;
      cer[name] += m.cer_pct / 5.0;
    }
  }

  const double margin_myopic = chr["dcmf"] - chr["mmyopic"];
  const double margin_greedy = chr["dcmf"] - chr["mgreedy"];
  const double cer_ratio = cer["mcac"] > 0.0 ? cer["dcmf"] / cer["mcac"] : 1e9;
  const double elapsed = clock.seconds();
  detail = "5-seed daily workload, 500-unit cache: mean chr dcmf " +
           fmt(chr["dcmf"], "%.2f") + "% vs mmyopic " + fmt(chr["mmyopic"], "%.2f") +
           "% (+" + fmt(margin_myopic, "%.2f") + "pp) and mgreedy " +
           fmt(chr["mgreedy"], "%.2f") + "% (+" + fmt(margin_greedy, "%.2f") +
           "pp), need >= +5pp; mean cer dcmf/mcac " + fmt(cer["dcmf"], "%.2f") + "/" +
           fmt(cer["mcac"], "%.2f") + " = " + fmt(cer_ratio, "%.3f") +
           ", need <= 0.6; " + fmt(elapsed, "%.1f") + " s (limit 120)";
  return margin_myopic >= 5.0 && margin_greedy >= 5.0 && cer_ratio <= 0.6 &&
         elapsed < 120.0;
}

// ---- A6: hits grow with capacity -----------------------------------------------------

bool a6(std::string& detail) {
  const cc::config::RunConfig& cfg = cc::config::scenario_preset(1).config;
  cc::context::Corpus corpus = cc::config::materialize_corpus(cfg, std::nullopt, 1);
  cc::workload::Trace trace =
      cc::config::materialize_trace(cfg, corpus, std::nullopt, std::nullopt, 1);
  const std::vector<std::uint32_t> capacities = {50, 250, 500, 750, 1000};
  std::ostringstream seen;
  for (const char* name : {"dcmf", "lru", "lfu", "mgreedy"}) {
    cc::sim::RunInputs base;
    base.corpus = &corpus;
    base.trace = &trace;
    base.policy = name;
    base.params = cfg.resolved_params();
    base.latency = cfg.latency;
    base.sweep_interval_ms = cfg.sweep_interval_ms;
    base.seed = cc::derive_seed(1, "a6/" + std::string(name));
    std::vector<cc::sim::RunResult> runs = cc::sim::sweep_capacities(base, capacities);
    seen << " " << name << ":";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      seen << (i ? "," : "") << runs[i].metrics.q_cache;
      if (i > 0 && runs[i].metrics.q_cache < runs[i - 1].metrics.q_cache) {
        detail = "cumulative hits fell for " + std::string(name) + " between capacity " +
                 std::to_string(capacities[i - 1]) + " and " +
                 std::to_string(capacities[i]) + " (" +
                 std::to_string(runs[i - 1].metrics.q_cache) + " -> " +
                 std::to_string(runs[i].metrics.q_cache) + ")";
        return false;
      }
    }
  }
  detail = "cumulative hits non-decreasing over capacities 50/250/500/750/1000 on one "
           "fixed trace:" +
           seen.str();
  return true;
}

// ---- A7: repeated compare invocations are byte-identical -----------------------------

bool a7(std::string& detail) {
  if (g_cli.empty()) {
    detail = "no command-line binary path supplied";
    return false;
  }
  fs::path root = fs::temp_directory_path() / "ctxcache_acceptance_a7";
  fs::remove_all(root);
  fs::create_directories(root);

  cc::config::RunConfig cfg;
  cfg.corpus.gen.n_attributes = 140;
  cfg.corpus.gen.n_items = 40;
  cfg.corpus.gen.lifetime_lo_ms = 60'000;
  cfg.corpus.gen.lifetime_hi_ms = 300'000;
  cfg.trace.expected_total = 8000.0;
  cfg.trace.consumers = 50;
  cfg.seed = 99;
  fs::path cfg_path = root / "config.json";
  {
    std::ofstream out(cfg_path);
    out << cfg.to_json().dump(2) << "\n";
  }

  auto invoke = [&](const std::string& out_dir) {
    std::string cmd = g_cli + " compare --config " + cfg_path.string() +
                      " --policies dcmf,mcac,lru --capacities 32,64 --log-actions --out " +
                      out_dir + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
  };
  if (!invoke((root / "a").string()) || !invoke((root / "b").string())) {
    detail = "compare invocation failed";
    fs::remove_all(root);
    return false;
  }

  std::size_t compared = 0;
  std::size_t mismatched = 0;
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("metrics_", 0) == 0 || name.rfind("actions_", 0) == 0 ||
        name.rfind("sweeps_", 0) == 0) {
      names.push_back(name);
    }
  }
  std::sort(names.begin(), names.end());
  for (const std::string& name : names) {
    if (!fs::exists(root / "b" / name)) {
      detail = "second invocation missing artifact " + name;
      fs::remove_all(root);
      return false;
    }
    ++compared;
    if (read_file(root / "a" / name) != read_file(root / "b" / name)) ++mismatched;
  }
  fs::remove_all(root);

  // 6 runs: metrics + action logs for each, sweep logs for the two
  // evidence-policy runs.
  const std::size_t expected = 6 + 6 + 2;
  detail = std::to_string(compared) + " metric/action/sweep artifacts from two identical "
           "compare invocations (expect " +
           std::to_string(expected) + "), " + std::to_string(mismatched) +
           " byte mismatches";
  return compared == expected && mismatched == 0;
}

// ---- A8: workload generator statistics -----------------------------------------------

bool a8(std::string& detail) {
  cc::workload::CorpusGenSpec spec;
  spec.n_attributes = 14;
  spec.n_items = 4;
  spec.lifetime_lo_ms = 60'000;
  spec.lifetime_hi_ms = 120'000;
  spec.seed = 3;
  cc::context::Corpus corpus = cc::workload::gen_corpus(spec);
  cc::workload::PopularityModel model;

  cc::workload::DiurnalProfile profile = cc::workload::DiurnalProfile::standard(70'000.0);
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    total += static_cast<double>(
        cc::workload::gen_diurnal_trace(corpus, model, profile, 100, seed).events.size());
  }
  const double diurnal_mean = total / 100.0;
  const double diurnal_dev_pct = std::abs(diurnal_mean - 70'000.0) / 70'000.0 * 100.0;

  struct TierCheck {
    const char* name;
    double qpm;
    double mean = 0.0;
    double limit = 0.0;
  };
  TierCheck tiers[] = {{"low", 30.0}, {"medium", 60.0}, {"high", 120.0}};
  bool tiers_ok = true;
  const int n_traces = 20;
  const double minutes = 60.0;
  for (TierCheck& t : tiers) {
    double events = 0.0;
    for (std::uint64_t seed = 1; seed <= n_traces; ++seed) {
      events += static_cast<double>(
          cc::workload::gen_poisson_trace(corpus, model, cc::workload::tier_by_name(t.name),
                                          static_cast<cc::DurationMs>(minutes * 60'000.0),
                                          100, seed)
              .events.size());
    }
    t.mean = events / (n_traces * minutes);
    t.limit = 3.0 * std::sqrt(t.qpm / (n_traces * minutes));  // 3 standard errors
    if (std::abs(t.mean - t.qpm) > t.limit) tiers_ok = false;
  }

  detail = "daily generator mean total " + fmt(diurnal_mean, "%.1f") +
           " over 100 seeds (target 70000, dev " + fmt(diurnal_dev_pct, "%.3f") +
           "%, tol 1%); steady tiers " + fmt(tiers[0].mean, "%.2f") + "/" +
           fmt(tiers[1].mean, "%.2f") + "/" + fmt(tiers[2].mean, "%.2f") +
           " qpm vs 30/60/120 (3-SE limits " + fmt(tiers[0].limit, "%.2f") + "/" +
           fmt(tiers[1].limit, "%.2f") + "/" + fmt(tiers[2].limit, "%.2f") + ")";
  return diurnal_dev_pct <= 1.0 && tiers_ok;
}

// ---- A9: sweep cost scaling and end-to-end runtime -----------------------------------

double median_sweep_seconds(const cc::context::Corpus& corpus, std::size_t k) {
  cc::eval::AccessTracker tracker(corpus, 30 * 60'000);
  cc::policy::PolicyParams params;
  params.capacity_units = static_cast<std::uint32_t>(k);
  cc::cache::DcmfPolicy policy(params, {&corpus, &tracker});
  // Spread the initial refresh stamps over the same absolute span (0..500 ms)
  // at every occupancy, so both rigs settle into the same refresh/evict cycle
  // with proportional per-sweep churn and the only variable left is k.
  cc::TimeMs now = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::string& id = corpus.targets()[i].id;
    now = static_cast<cc::TimeMs>(i * 500 / k);
    tracker.record(id, now);
    policy.on_query(id, now);
  }
  now = 500;
  if (policy.occupancy_units() != k) {
    throw std::runtime_error("prefill failed to reach occupancy " + std::to_string(k));
  }
  for (int warm = 0; warm < 3; ++warm) {  // settle the refresh/evict cycle
    now += 500;
    policy.on_tick(now);
  }
  std::vector<double> trials;
  const int reps = 9;  // whole multiples of the settled three-sweep cycle
  for (int trial = 0; trial < 12; ++trial) {
    Stopwatch clock;
    for (int r = 0; r < reps; ++r) {
      now += 500;
      policy.on_tick(now);
    }
    trials.push_back(clock.seconds() / reps);
  }
  std::nth_element(trials.begin(), trials.begin() + trials.size() / 2, trials.end());
  return trials[trials.size() / 2];
}

bool a9(std::string& detail) {
  cc::context::Corpus corpus;
  for (int i = 0; i < 1000; ++i) {
    cc::context::ContextAttribute a;
    char id[8];
    std::snprintf(id, sizeof id, "a%04d", i);
    a.def.id = id;
    a.def.kind = cc::context::ValueKind::kNumber;
    a.value = 1.0;
    a.validity_lifetime_ms = 3'600'000;
    a.decay_lambda_per_ms = std::log(2.0) / 3'600'000.0;
    corpus.add_attribute(std::move(a));
  }
  corpus.finalize();

  const double t500 = median_sweep_seconds(corpus, 500);
  const double t1000 = median_sweep_seconds(corpus, 1000);
  const double ratio = t500 > 0.0 ? t1000 / t500 : 1e9;

  const cc::config::RunConfig& cfg = cc::config::scenario_preset(1).config;
  cc::context::Corpus run_corpus = cc::config::materialize_corpus(cfg, std::nullopt, 1);
  cc::workload::Trace trace =
      cc::config::materialize_trace(cfg, run_corpus, std::nullopt, std::nullopt, 1);
  cc::sim::RunInputs in;
  in.corpus = &run_corpus;
  in.trace = &trace;
  in.policy = "dcmf";
  in.params = cfg.resolved_params();
  in.latency = cfg.latency;
  in.sweep_interval_ms = cfg.sweep_interval_ms;
  in.seed = cc::derive_seed(1, "a9");
  Stopwatch clock;
  cc::sim::MetricsReport m = cc::sim::run(in).metrics;
  const double run_s = clock.seconds();

  detail = "median sweep time " + fmt(t500 * 1e3, "%.3f") + " ms at occupancy 500 -> " +
           fmt(t1000 * 1e3, "%.3f") + " ms at 1000 over 12 trials x 9 sweeps, ratio " +
           fmt(ratio, "%.2f") + " (limit 2.5); " + std::to_string(m.q_total) +
           "-query run in " + fmt(run_s, "%.2f") + " s (limit 60)";
  return ratio <= 2.5 && run_s < 60.0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];

  struct Criterion {
    const char* id;
    bool (*check)(std::string&);
  };
  const Criterion criteria[] = {
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.check(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s - %s\n", c.id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
