// Command-line front end: generate corpora and traces, run one simulation,
// fan a comparison matrix out to worker threads, and list scenario presets.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctxcache/config.hpp"
#include "ctxcache/rng.hpp"
#include "ctxcache/simulator.hpp"

namespace fs = std::filesystem;
namespace cc = ctxcache;

namespace {

// ---- small helpers ------------------------------------------------------------

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void ensure_parent_dir(const fs::path& file) {
  fs::path dir = file.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
}

void write_text_file(const fs::path& path, const std::string& text) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cc::ValidationError("cannot write file: " + path.string());
  out << text;
}

std::string checksum_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cc::ValidationError("cannot read file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  char hex[24];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(cc::fnv1a64(bytes)));
  return hex;
}

// ---- flag handling --------------------------------------------------------------

struct Flags {
  std::string config_path;
  int scenario = 0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> policies;
  std::vector<std::uint32_t> capacities;
  std::vector<std::string> tiers;
  std::vector<std::uint32_t> providers;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  bool log_actions = false;

  // gen-only overrides
  std::optional<double> minutes;
  std::optional<std::uint32_t> gen_items;
  std::optional<std::uint32_t> gen_attributes;
  std::optional<std::uint32_t> gen_providers;
};

void add_common_flags(CLI::App* cmd, Flags* f) {
  cmd->add_option("--config", f->config_path, "Config file (JSON); flags override it");
  cmd->add_option("--scenario", f->scenario, "Scenario preset 1..4 to start from")
      ->check(CLI::Range(1, 4));
  cmd->add_option("--seed", f->seed, "Base seed for the whole pipeline");
  cmd->add_option("--out", f->out, "Output directory");
}

// Layer order: defaults -> scenario preset -> config file -> flags.
cc::config::RunConfig resolve_config(const Flags& f) {
  nlohmann::json file = nlohmann::json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw cc::ValidationError("cannot open config file: " + f.config_path);
    file = nlohmann::json::parse(in);
  }
  cc::config::RunConfig cfg = cc::config::build_config(file, f.scenario);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out_dir = *f.out;
  if (f.workers) cfg.workers = *f.workers;
  if (f.log_actions) cfg.log_actions = true;
  if (!f.policies.empty()) {
    cfg.policy = f.policies.front();
    cfg.policies = f.policies;
  }
  if (!f.capacities.empty()) cfg.capacities = f.capacities;
  if (!f.providers.empty()) cfg.providers = f.providers;
  if (f.minutes) cfg.trace.minutes = *f.minutes;
  if (f.gen_items) cfg.corpus.gen.n_items = *f.gen_items;
  if (f.gen_attributes) cfg.corpus.gen.n_attributes = *f.gen_attributes;
  if (f.gen_providers) cfg.corpus.providers = *f.gen_providers;
  return cfg;
}

// Exit code 2 contract: bad policy names are reported with the valid set.
int check_policy_names(const std::vector<std::string>& names) {
  for (const std::string& n : names) {
    if (!cc::policy::is_known_policy(n)) {
      std::string valid;
      for (const std::string& k : cc::policy::known_policies()) {
        if (!valid.empty()) valid += ' ';
        valid += k;
      }
      std::cerr << "error: unknown policy '" << n << "'; valid policies: " << valid << "\n";
      return 2;
    }
  }
  return 0;
}

// ---- run artifacts ---------------------------------------------------------------

std::string run_key(int scenario, const std::string& policy, std::uint32_t capacity,
                    const std::string& tier_label, std::optional<std::uint32_t> providers) {
  std::string k = "s" + std::to_string(scenario) + "_" + policy + "_cap" +
                  std::to_string(capacity) + "_" + tier_label;
  if (providers) k += "_p" + std::to_string(*providers);
  return k;
}

std::string actions_csv(const std::vector<cc::policy::CacheActionRecord>& actions) {
  std::ostringstream out;
  out << "timestamp_ms,action,target_id,belief,reason\n";
  for (const auto& a : actions) {
    out << a.timestamp << ',' << cc::policy::to_string(a.type) << ',' << a.item_id << ','
        << fmt(a.belief) << ',' << a.reason << '\n';
  }
  return out.str();
}

std::string sweeps_csv(const std::vector<cc::cache::SweepStats>& sweeps) {
  std::ostringstream out;
  out << "timestamp_ms,theta_update,theta_evict,occupancy_units,mean_cf,refreshes,"
         "evictions,admissions\n";
  for (const auto& s : sweeps) {
    out << s.timestamp << ',' << fmt(s.theta_update) << ',' << fmt(s.theta_evict) << ','
        << s.occupancy_units << ',' << fmt(s.mean_cf) << ',' << s.refreshes << ','
        << s.evictions << ',' << s.admissions << '\n';
  }
  return out.str();
}

void write_run_artifacts(const fs::path& out_dir, const std::string& key,
                         const cc::sim::RunResult& result, bool log_actions) {
  write_text_file(out_dir / ("metrics_" + key + ".json"),
                  result.metrics.to_json().dump(2) + "\n");
  if (log_actions) {
    write_text_file(out_dir / ("actions_" + key + ".csv"), actions_csv(result.actions));
    if (!result.sweeps.empty()) {
      write_text_file(out_dir / ("sweeps_" + key + ".csv"), sweeps_csv(result.sweeps));
    }
  }
}

void write_config_echo(const fs::path& out_dir, const cc::config::RunConfig& cfg) {
  double cr = 0.0;
  cc::policy::PolicyParams params = cfg.resolved_params(&cr);
  nlohmann::json echo = cfg.to_json();
  if (!params.maut_weights.w.empty()) {
    echo["resolved_maut_weights"] = params.maut_weights.w;
    echo["maut_consistency_ratio"] = cr;
  }
  write_text_file(out_dir / "config_echo.json", echo.dump(2) + "\n");
}

void print_run_summary(const cc::sim::MetricsReport& m, const std::string& key) {
  std::printf("run %s\n", key.c_str());
  std::printf("  queries            %llu (hit %llu, expired %llu, miss %llu)\n",
              static_cast<unsigned long long>(m.q_total),
              static_cast<unsigned long long>(m.q_cache),
              static_cast<unsigned long long>(m.q_expired),
              static_cast<unsigned long long>(m.q_miss));
  std::printf("  hit/miss/expired %%  %.2f / %.2f / %.2f\n", m.chr_pct, m.cmr_pct, m.cer_pct);
  std::printf("  response ms        mean %.2f  stddev %.2f  p95 %.2f\n", m.response_mean_ms,
              m.response_stddev_ms, m.response_p95_ms);
  std::printf("  throughput         %.2f queries/s\n", m.throughput_qps);
  std::printf("  cache activity     admissions %llu  evictions %llu  refreshes %llu\n",
              static_cast<unsigned long long>(m.admissions),
              static_cast<unsigned long long>(m.evictions),
              static_cast<unsigned long long>(m.background_refreshes));
  std::printf("  peak occupancy     %llu/%u units (%.1f%%)\n",
              static_cast<unsigned long long>(m.peak_occupancy_units), m.capacity_units,
              m.utilization_pct);
}

// ---- gen -------------------------------------------------------------------------

int cmd_gen(const Flags& f) {
  cc::config::RunConfig cfg = resolve_config(f);
  if (!f.tiers.empty()) {
    cfg.trace.profile = cc::config::TraceSpec::Profile::kPoisson;
    cfg.trace.tier = f.tiers.front();
  }
  cfg.validate();

  cc::context::Corpus corpus = cc::config::materialize_corpus(cfg, std::nullopt, cfg.seed);
  cc::workload::Trace trace =
      cc::config::materialize_trace(cfg, corpus, std::nullopt, std::nullopt, cfg.seed);

  fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir);
  fs::path corpus_path = out_dir / "corpus.json";
  fs::path trace_path = out_dir / "trace.csv";
  corpus.save_file(corpus_path.string());
  trace.save_csv(trace_path.string());

  std::printf("%s  fnv1a64=%s  targets=%zu\n", corpus_path.string().c_str(),
              checksum_hex(corpus_path).c_str(), corpus.targets().size());
  std::printf("%s  fnv1a64=%s  events=%zu  duration_ms=%lld\n", trace_path.string().c_str(),
              checksum_hex(trace_path).c_str(), trace.events.size(),
              static_cast<long long>(trace.duration_ms()));
  return 0;
}

// ---- run -------------------------------------------------------------------------

int cmd_run(const Flags& f) {
  cc::config::RunConfig cfg = resolve_config(f);
  if (!f.tiers.empty()) {
    cfg.trace.profile = cc::config::TraceSpec::Profile::kPoisson;
    cfg.trace.tier = f.tiers.front();
  }
  if (int rc = check_policy_names({cfg.policy}); rc != 0) return rc;
  cfg.validate();

  double cr = 0.0;
  cc::policy::PolicyParams params = cfg.resolved_params(&cr);
  if (!cfg.capacities.empty()) params.capacity_units = cfg.capacities.front();

  cc::context::Corpus corpus = cc::config::materialize_corpus(cfg, std::nullopt, cfg.seed);
  cc::workload::Trace trace =
      cc::config::materialize_trace(cfg, corpus, std::nullopt, std::nullopt, cfg.seed);

  std::string tier_label = cfg.trace.path ? "file"
                           : cfg.trace.profile == cc::config::TraceSpec::Profile::kPoisson
                               ? cfg.trace.tier
                               : "diurnal";
  std::string key = run_key(cfg.scenario, cfg.policy, params.capacity_units, tier_label,
                            cfg.corpus.providers);

  cc::sim::RunInputs in;
  in.corpus = &corpus;
  in.trace = &trace;
  in.policy = cfg.policy;
  in.params = params;
  in.latency = cfg.latency;
  in.sweep_interval_ms = cfg.sweep_interval_ms;
  in.seed = cc::derive_seed(cfg.seed, key);
  in.capture_actions = cfg.log_actions;
  cc::sim::RunResult result = cc::sim::run(in);

  fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir);
  write_config_echo(out_dir, cfg);
  write_run_artifacts(out_dir, key, result, cfg.log_actions);
  print_run_summary(result.metrics, key);
  return 0;
}

// ---- compare -----------------------------------------------------------------------

struct RunJob {
  std::size_t corpus_ix = 0;
  std::size_t trace_ix = 0;
  std::optional<std::uint32_t> providers;  // effective provider count, if known
  std::string tier_label;
  std::string policy;
  std::uint32_t capacity = 0;
  std::string key;
  std::uint64_t seed = 0;
};

int cmd_compare(const Flags& f) {
  cc::config::RunConfig cfg = resolve_config(f);
  if (!f.tiers.empty()) cfg.tiers = f.tiers;

  std::vector<std::string> policies =
      cfg.policies.empty() ? cc::policy::known_policies() : cfg.policies;
  if (int rc = check_policy_names(policies); rc != 0) return rc;
  cfg.validate();

  double cr = 0.0;
  cc::policy::PolicyParams base_params = cfg.resolved_params(&cr);

  std::vector<std::uint32_t> capacities =
      cfg.capacities.empty() ? std::vector<std::uint32_t>{base_params.capacity_units}
                             : cfg.capacities;
  std::sort(capacities.begin(), capacities.end());

  std::vector<std::optional<std::uint32_t>> provider_axis;
  if (cfg.providers.empty()) {
    provider_axis.push_back(std::nullopt);
  } else {
    for (std::uint32_t p : cfg.providers) provider_axis.push_back(p);
  }
  std::vector<std::optional<std::string>> tier_axis;
  if (cfg.tiers.empty()) {
    tier_axis.push_back(std::nullopt);
  } else {
    for (const std::string& t : cfg.tiers) tier_axis.push_back(t);
  }

  // Materialize each (providers, tier) cell once; all policies and
  // capacities replay the same trace for comparability.
  std::vector<cc::context::Corpus> corpora;
  std::vector<cc::workload::Trace> traces;
  std::vector<RunJob> jobs;
  for (const auto& prov : provider_axis) {
    corpora.push_back(cc::config::materialize_corpus(cfg, prov, cfg.seed));
    std::size_t corpus_ix = corpora.size() - 1;
    std::optional<std::uint32_t> effective_prov = prov ? prov : cfg.corpus.providers;
    for (const auto& tier : tier_axis) {
      traces.push_back(
          cc::config::materialize_trace(cfg, corpora[corpus_ix], tier, prov, cfg.seed));
      std::size_t trace_ix = traces.size() - 1;
      std::string tier_label =
          tier ? *tier
               : (cfg.trace.path ? "file"
                  : cfg.trace.profile == cc::config::TraceSpec::Profile::kPoisson
                      ? cfg.trace.tier
                      : "diurnal");
      for (const std::string& policy : policies) {
        for (std::uint32_t capacity : capacities) {
          RunJob job;
          job.corpus_ix = corpus_ix;
          job.trace_ix = trace_ix;
          job.providers = effective_prov;
          job.tier_label = tier_label;
          job.policy = policy;
          job.capacity = capacity;
          job.key = run_key(cfg.scenario, policy, capacity, tier_label, effective_prov);
          job.seed = cc::derive_seed(cfg.seed, job.key);
          jobs.push_back(std::move(job));
        }
      }
    }
  }

  // Worker pool; results land at their job index, so every output below is
  // in matrix order no matter which thread finished first.
  std::vector<cc::sim::RunResult> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t n_workers = cfg.workers != 0 ? cfg.workers : (hw != 0 ? hw : 4);
  n_workers = std::min<std::size_t>(std::max<std::size_t>(n_workers, 1), jobs.size());

  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        cc::sim::RunInputs in;
        in.corpus = &corpora[jobs[i].corpus_ix];
        in.trace = &traces[jobs[i].trace_ix];
        in.policy = jobs[i].policy;
        in.params = base_params;
        in.params.capacity_units = jobs[i].capacity;
        in.latency = cfg.latency;
        in.sweep_interval_ms = cfg.sweep_interval_ms;
        in.seed = jobs[i].seed;
        in.capture_actions = cfg.log_actions;
        results[i] = cc::sim::run(in);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();

  int failures = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i]) continue;
    ++failures;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      std::cerr << "error: run " << jobs[i].key << " failed: " << e.what() << "\n";
    }
  }
  if (failures != 0) return 1;

  // ---- merged artifacts ----
  fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir);
  write_config_echo(out_dir, cfg);

  const std::string id_header = "scenario,policy,tier,providers,capacity_units";
  std::ostringstream fig4, fig5, fig6, fig7, fig8, fig9, summary;
  fig4 << id_header << ",cumulative_hits\n";
  fig5 << id_header << ",cer_pct\n";
  fig6 << id_header << ",offered_qps,mean_response_ms\n";
  fig7 << id_header << ",mean_response_ms\n";
  fig8 << id_header << ",throughput_qps\n";
  fig9 << id_header << ",running_time_ms\n";
  summary << id_header
          << ",q_total,q_cache,q_expired,q_miss,chr_pct,cmr_pct,cer_pct,response_mean_ms,"
             "response_stddev_ms,response_p95_ms,throughput_qps,admissions,evictions,"
             "background_refreshes,peak_occupancy_units,utilization_pct\n";

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const RunJob& job = jobs[i];
    const cc::sim::MetricsReport& m = results[i].metrics;
    write_run_artifacts(out_dir, job.key, results[i], cfg.log_actions);

    std::ostringstream id;
    id << cfg.scenario << ',' << job.policy << ',' << job.tier_label << ','
       << (job.providers ? *job.providers : 0) << ',' << job.capacity;
    const std::string id_cols = id.str();

    const cc::workload::Trace& trace = traces[job.trace_ix];
    double span_s = static_cast<double>(trace.duration_ms()) / 1000.0;
    double offered = span_s > 0.0 ? static_cast<double>(trace.events.size()) / span_s : 0.0;

    fig4 << id_cols << ',' << m.q_cache << '\n';
    fig5 << id_cols << ',' << fmt(m.cer_pct) << '\n';
    fig6 << id_cols << ',' << fmt(offered) << ',' << fmt(m.response_mean_ms) << '\n';
    fig7 << id_cols << ',' << fmt(m.response_mean_ms) << '\n';
    fig8 << id_cols << ',' << fmt(m.throughput_qps) << '\n';
    fig9 << id_cols << ',' << fmt(m.running_time_ms) << '\n';
    summary << id_cols << ',' << m.q_total << ',' << m.q_cache << ',' << m.q_expired << ','
            << m.q_miss << ',' << fmt(m.chr_pct) << ',' << fmt(m.cmr_pct) << ','
            << fmt(m.cer_pct) << ',' << fmt(m.response_mean_ms) << ','
            << fmt(m.response_stddev_ms) << ',' << fmt(m.response_p95_ms) << ','
            << fmt(m.throughput_qps) << ',' << m.admissions << ',' << m.evictions << ','
            << m.background_refreshes << ',' << m.peak_occupancy_units << ','
            << fmt(m.utilization_pct) << '\n';
  }
  write_text_file(out_dir / "fig4_hits.csv", fig4.str());
  write_text_file(out_dir / "fig5_expired.csv", fig5.str());
  write_text_file(out_dir / "fig6_resp_vs_rate.csv", fig6.str());
  write_text_file(out_dir / "fig7_latency.csv", fig7.str());
  write_text_file(out_dir / "fig8_throughput.csv", fig8.str());
  write_text_file(out_dir / "fig9_runtime.csv", fig9.str());
  write_text_file(out_dir / "summary.csv", summary.str());

  // ---- human-readable tables: one per (providers, tier, capacity) ----
  struct Row {
    const char* label;
    double (*get)(const cc::sim::MetricsReport&);
  };
  static const Row rows[] = {
      {"hit ratio %", [](const cc::sim::MetricsReport& m) { return m.chr_pct; }},
      {"miss ratio %", [](const cc::sim::MetricsReport& m) { return m.cmr_pct; }},
      {"expired ratio %", [](const cc::sim::MetricsReport& m) { return m.cer_pct; }},
      {"mean response ms",
       [](const cc::sim::MetricsReport& m) { return m.response_mean_ms; }},
      {"p95 response ms",
       [](const cc::sim::MetricsReport& m) { return m.response_p95_ms; }},
      {"throughput q/s", [](const cc::sim::MetricsReport& m) { return m.throughput_qps; }},
      {"utilization %", [](const cc::sim::MetricsReport& m) { return m.utilization_pct; }},
  };

  struct GroupKey {
    std::string tier_label;
    std::optional<std::uint32_t> providers;
    std::uint32_t capacity = 0;
    bool operator==(const GroupKey&) const = default;
  };
  std::vector<GroupKey> groups;
  for (const RunJob& job : jobs) {
    GroupKey key{job.tier_label, job.providers, job.capacity};
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) {
      groups.push_back(std::move(key));
    }
  }
  for (const GroupKey& group : groups) {
    std::vector<std::size_t> cell;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (GroupKey{jobs[i].tier_label, jobs[i].providers, jobs[i].capacity} == group) {
        cell.push_back(i);
      }
    }
    std::string prov_label = group.providers ? std::to_string(*group.providers) : "default";
    std::printf("\nscenario %d | tier %s | providers %s | capacity %u\n", cfg.scenario,
                group.tier_label.c_str(), prov_label.c_str(), group.capacity);
    std::printf("%-18s", "metric");
    for (std::size_t i : cell) std::printf(" %10s", jobs[i].policy.c_str());
    std::printf("\n");
    for (const Row& row : rows) {
      std::printf("%-18s", row.label);
      for (std::size_t i : cell) std::printf(" %10.2f", row.get(results[i].metrics));
      std::printf("\n");
    }
  }
  std::printf("\n%zu runs -> %s\n", jobs.size(), out_dir.string().c_str());
  return 0;
}

// ---- scenarios -----------------------------------------------------------------------

int cmd_scenarios(bool dump) {
  if (dump) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : cc::config::scenario_presets()) {
      arr.push_back({{"scenario", p.number},
                     {"name", p.name},
                     {"blurb", p.blurb},
                     {"config", p.config.to_json()}});
    }
    std::cout << arr.dump(2) << "\n";
    return 0;
  }
  for (const auto& p : cc::config::scenario_presets()) {
    std::printf("%d  %-16s %s\n", p.number, p.name.c_str(), p.blurb.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"context cache simulation harness"};
  app.require_subcommand(1);

  Flags gen_flags, run_flags, cmp_flags;
  bool scenarios_dump = false;

  CLI::App* gen = app.add_subcommand("gen", "Generate a corpus and a trace");
  add_common_flags(gen, &gen_flags);
  gen->add_option("--tier", gen_flags.tiers, "Steady-rate tier (low|medium|high); switches the trace to steady arrivals")
      ->delimiter(',');
  gen->add_option("--minutes", gen_flags.minutes, "Steady-rate trace length in minutes");
  gen->add_option("--items", gen_flags.gen_items, "Rule items in the generated corpus");
  gen->add_option("--attributes", gen_flags.gen_attributes,
                  "Attributes in the generated corpus");
  gen->add_option("--providers", gen_flags.gen_providers,
                  "Provider sites (overrides --items/--attributes: 2 items + 7 attributes per site)");

  CLI::App* run = app.add_subcommand("run", "Run one policy over one trace");
  add_common_flags(run, &run_flags);
  run->add_option("--policy", run_flags.policies, "Policy name")->delimiter(',');
  run->add_option("--capacities", run_flags.capacities, "Cache capacity in units (first value used)")
      ->delimiter(',');
  run->add_option("--tier", run_flags.tiers, "Steady-rate tier; switches the trace to steady arrivals")
      ->delimiter(',');
  run->add_flag("--log-actions", run_flags.log_actions, "Write action and sweep logs");

  CLI::App* cmp = app.add_subcommand("compare", "Run a policy/capacity/tier/provider matrix");
  add_common_flags(cmp, &cmp_flags);
  cmp->add_option("--policy,--policies", cmp_flags.policies, "Policies to compare (default: all)")
      ->delimiter(',');
  cmp->add_option("--capacities", cmp_flags.capacities, "Capacity axis (run ascending)")
      ->delimiter(',');
  cmp->add_option("--tier,--tiers", cmp_flags.tiers, "Steady-rate tier axis")->delimiter(',');
  cmp->add_option("--providers", cmp_flags.providers, "Provider-count axis (regenerates the corpus per count)")
      ->delimiter(',');
  cmp->add_option("--workers", cmp_flags.workers, "Worker threads (default: core count)");
  cmp->add_flag("--log-actions", cmp_flags.log_actions, "Write action and sweep logs per run");

  CLI::App* scen = app.add_subcommand("scenarios", "List scenario presets");
  scen->add_flag("--dump", scenarios_dump, "Print full preset configs as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_flags);
    if (run->parsed()) return cmd_run(run_flags);
    if (cmp->parsed()) return cmd_compare(cmp_flags);
    if (scen->parsed()) return cmd_scenarios(scenarios_dump);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
