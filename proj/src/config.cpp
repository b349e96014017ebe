#include "ctxcache/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <span>

#include "ctxcache/rng.hpp"

namespace ctxcache::config {

namespace {

// ---- enum <-> string ---------------------------------------------------------

const char* to_string(TraceSpec::Profile p) {
  return p == TraceSpec::Profile::kDiurnal ? "diurnal" : "poisson";
}

TraceSpec::Profile profile_from_string(const std::string& s) {
  if (s == "diurnal") return TraceSpec::Profile::kDiurnal;
  if (s == "poisson") return TraceSpec::Profile::kPoisson;
  throw ValidationError("unknown trace profile '" + s + "'; valid: diurnal poisson");
}

const char* to_string(evidence::CombineRule r) {
  return r == evidence::CombineRule::kDst ? "dst" : "weighted_sum";
}

evidence::CombineRule combine_rule_from_string(const std::string& s) {
  if (s == "dst") return evidence::CombineRule::kDst;
  if (s == "weighted_sum") return evidence::CombineRule::kWeightedSum;
  throw ValidationError("unknown combine rule '" + s + "'; valid: dst weighted_sum");
}

const char* to_string(policy::PoaScoreMode m) {
  switch (m) {
    case policy::PoaScoreMode::kMeanRelative: return "mean_relative";
    case policy::PoaScoreMode::kMaxRelative: return "max_relative";
    case policy::PoaScoreMode::kRaw: return "raw";
  }
  return "mean_relative";
}

policy::PoaScoreMode poa_score_mode_from_string(const std::string& s) {
  if (s == "mean_relative") return policy::PoaScoreMode::kMeanRelative;
  if (s == "max_relative") return policy::PoaScoreMode::kMaxRelative;
  if (s == "raw") return policy::PoaScoreMode::kRaw;
  throw ValidationError("unknown access score mode '" + s +
                        "'; valid: mean_relative max_relative raw");
}

const char* to_string(policy::MassSource m) {
  return m == policy::MassSource::kPoa ? "poa" : "priority";
}

policy::MassSource mass_source_from_string(const std::string& s) {
  if (s == "poa") return policy::MassSource::kPoa;
  if (s == "priority") return policy::MassSource::kPriority;
  throw ValidationError("unknown mass source '" + s + "'; valid: poa priority");
}

const char* to_string(workload::PopularityModel::Kind k) {
  return k == workload::PopularityModel::Kind::kZipf ? "zipf" : "normal_rank";
}

workload::PopularityModel::Kind popularity_kind_from_string(const std::string& s) {
  if (s == "zipf") return workload::PopularityModel::Kind::kZipf;
  if (s == "normal_rank") return workload::PopularityModel::Kind::kNormalRank;
  throw ValidationError("unknown popularity kind '" + s + "'; valid: zipf normal_rank");
}

const std::array<const char*, eval::kFactorCount>& factor_names() {
  static const std::array<const char*, eval::kFactorCount> names = {
      "poa", "qos", "coc", "qoc", "sla", "timeliness", "provider_type"};
  return names;
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const char* where) {
  if (!j.is_object()) throw ValidationError(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw ValidationError("unknown key '" + key + "' in " + where);
    }
  }
}

// ---- params json ---------------------------------------------------------------

void overlay_params(policy::PolicyParams* p, const nlohmann::json& j) {
  check_keys(j,
             {"capacity_units", "alpha", "beta", "kappa", "epsilon", "recent_window_ms",
              "combine_rule", "combine_weight_poa", "poa_score_mode", "mass_source",
              "maut_weights", "factor_ranges", "mcac_reward_utility_blend", "mcac_weights",
              "size_units"},
             "params");
  if (j.contains("capacity_units")) p->capacity_units = j.at("capacity_units").get<std::uint32_t>();
  if (j.contains("alpha")) p->alpha = j.at("alpha").get<double>();
  if (j.contains("beta")) p->beta = j.at("beta").get<double>();
  if (j.contains("kappa")) p->kappa = j.at("kappa").get<double>();
  if (j.contains("epsilon")) p->epsilon = j.at("epsilon").get<double>();
  if (j.contains("recent_window_ms")) p->recent_window_ms = j.at("recent_window_ms").get<DurationMs>();
  if (j.contains("combine_rule")) {
    p->combine_rule = combine_rule_from_string(j.at("combine_rule").get<std::string>());
  }
  if (j.contains("combine_weight_poa")) p->combine_weight_poa = j.at("combine_weight_poa").get<double>();
  if (j.contains("poa_score_mode")) {
    p->poa_score_mode = poa_score_mode_from_string(j.at("poa_score_mode").get<std::string>());
  }
  if (j.contains("mass_source")) {
    p->mass_source = mass_source_from_string(j.at("mass_source").get<std::string>());
  }
  if (j.contains("maut_weights")) {
    p->maut_weights.w = j.at("maut_weights").get<std::vector<double>>();
  }
  if (j.contains("factor_ranges")) {
    const nlohmann::json& ranges = j.at("factor_ranges");
    for (const auto& [name, spec] : ranges.items()) {
      std::size_t ix = 0;
      for (; ix < eval::kFactorCount; ++ix) {
        if (name == factor_names()[ix]) break;
      }
      if (ix == eval::kFactorCount) {
        throw ValidationError("unknown utility factor '" + name + "' in factor_ranges");
      }
      check_keys(spec, {"min", "max", "cost"}, "factor range");
      if (spec.contains("min")) p->factor_specs[ix].min = spec.at("min").get<double>();
      if (spec.contains("max")) p->factor_specs[ix].max = spec.at("max").get<double>();
      if (spec.contains("cost")) p->factor_specs[ix].cost = spec.at("cost").get<bool>();
    }
  }
  if (j.contains("mcac_reward_utility_blend")) {
    p->mcac_reward_utility_blend = j.at("mcac_reward_utility_blend").get<double>();
  }
  if (j.contains("mcac_weights")) {
    p->mcac_weights.w = j.at("mcac_weights").get<std::vector<double>>();
  }
  if (j.contains("size_units")) {
    for (const auto& [id, units] : j.at("size_units").items()) {
      p->size_units_override[id] = units.get<std::uint32_t>();
    }
  }
}

nlohmann::json params_to_json(const policy::PolicyParams& p) {
  nlohmann::json ranges;
  for (std::size_t i = 0; i < eval::kFactorCount; ++i) {
    ranges[factor_names()[i]] = {{"min", p.factor_specs[i].min},
                                 {"max", p.factor_specs[i].max},
                                 {"cost", p.factor_specs[i].cost}};
  }
  nlohmann::json j = {
      {"capacity_units", p.capacity_units},
      {"alpha", p.alpha},
      {"beta", p.beta},
      {"kappa", p.kappa},
      {"epsilon", p.epsilon},
      {"recent_window_ms", p.recent_window_ms},
      {"combine_rule", to_string(p.combine_rule)},
      {"combine_weight_poa", p.combine_weight_poa},
      {"poa_score_mode", to_string(p.poa_score_mode)},
      {"mass_source", to_string(p.mass_source)},
      {"factor_ranges", ranges},
      {"mcac_reward_utility_blend", p.mcac_reward_utility_blend},
  };
  if (!p.maut_weights.w.empty()) j["maut_weights"] = p.maut_weights.w;
  if (!p.mcac_weights.w.empty()) j["mcac_weights"] = p.mcac_weights.w;
  if (!p.size_units_override.empty()) {
    nlohmann::json sizes;
    for (const auto& [id, units] : p.size_units_override) sizes[id] = units;
    j["size_units"] = sizes;
  }
  return j;
}

// ---- corpus / trace spec json ---------------------------------------------------

void overlay_corpus(CorpusSpec* c, const nlohmann::json& j) {
  check_keys(j, {"path", "generate"}, "corpus");
  if (j.contains("path")) c->path = j.at("path").get<std::string>();
  if (j.contains("generate")) {
    const nlohmann::json& g = j.at("generate");
    check_keys(g, {"providers", "attributes", "items", "lifetime_lo_ms", "lifetime_hi_ms"},
               "corpus.generate");
    if (g.contains("providers")) c->providers = g.at("providers").get<std::uint32_t>();
    if (g.contains("attributes")) c->gen.n_attributes = g.at("attributes").get<std::uint32_t>();
    if (g.contains("items")) c->gen.n_items = g.at("items").get<std::uint32_t>();
    if (g.contains("lifetime_lo_ms")) c->gen.lifetime_lo_ms = g.at("lifetime_lo_ms").get<DurationMs>();
    if (g.contains("lifetime_hi_ms")) c->gen.lifetime_hi_ms = g.at("lifetime_hi_ms").get<DurationMs>();
  }
}

nlohmann::json corpus_to_json(const CorpusSpec& c) {
  nlohmann::json g = {{"attributes", c.gen.n_attributes},
                      {"items", c.gen.n_items},
                      {"lifetime_lo_ms", c.gen.lifetime_lo_ms},
                      {"lifetime_hi_ms", c.gen.lifetime_hi_ms}};
  if (c.providers) g["providers"] = *c.providers;
  nlohmann::json j = {{"generate", g}};
  if (c.path) j["path"] = *c.path;
  return j;
}

void overlay_popularity(workload::PopularityModel* m, const nlohmann::json& j) {
  check_keys(j, {"kind", "zipf_s", "normal_sigma_ranks"}, "trace.popularity");
  if (j.contains("kind")) m->kind = popularity_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("zipf_s")) m->zipf_s = j.at("zipf_s").get<double>();
  if (j.contains("normal_sigma_ranks")) m->normal_sigma_ranks = j.at("normal_sigma_ranks").get<double>();
}

void overlay_trace(TraceSpec* t, const nlohmann::json& j) {
  check_keys(j,
             {"path", "profile", "tier", "minutes", "expected_total", "peak_boost",
              "consumers", "popularity"},
             "trace");
  if (j.contains("path")) t->path = j.at("path").get<std::string>();
  if (j.contains("profile")) t->profile = profile_from_string(j.at("profile").get<std::string>());
  if (j.contains("tier")) t->tier = j.at("tier").get<std::string>();
  if (j.contains("minutes")) t->minutes = j.at("minutes").get<double>();
  if (j.contains("expected_total")) t->expected_total = j.at("expected_total").get<double>();
  if (j.contains("peak_boost")) t->peak_boost = j.at("peak_boost").get<double>();
  if (j.contains("consumers")) t->consumers = j.at("consumers").get<std::uint32_t>();
  if (j.contains("popularity")) overlay_popularity(&t->popularity, j.at("popularity"));
}

nlohmann::json trace_to_json(const TraceSpec& t) {
  nlohmann::json j = {
      {"profile", to_string(t.profile)},
      {"tier", t.tier},
      {"minutes", t.minutes},
      {"expected_total", t.expected_total},
      {"peak_boost", t.peak_boost},
      {"consumers", t.consumers},
      {"popularity",
       {{"kind", to_string(t.popularity.kind)},
        {"zipf_s", t.popularity.zipf_s},
        {"normal_sigma_ranks", t.popularity.normal_sigma_ranks}}},
  };
  if (t.path) j["path"] = *t.path;
  return j;
}

}  // namespace

// ---- RunConfig -------------------------------------------------------------------

void RunConfig::overlay(const nlohmann::json& j) {
  check_keys(j,
             {"scenario", "corpus", "trace", "policy", "policies", "capacities", "tiers",
              "providers", "params", "maut_priorities", "latency", "sweep_interval_ms",
              "seed", "out", "workers", "log_actions"},
             "config");
  // "scenario" selects the preset base; build_config consumes it before
  // overlaying, so it is accepted but not re-applied here.
  if (j.contains("corpus")) overlay_corpus(&corpus, j.at("corpus"));
  if (j.contains("trace")) overlay_trace(&trace, j.at("trace"));
  if (j.contains("policy")) policy = j.at("policy").get<std::string>();
  if (j.contains("policies")) policies = j.at("policies").get<std::vector<std::string>>();
  if (j.contains("capacities")) capacities = j.at("capacities").get<std::vector<std::uint32_t>>();
  if (j.contains("tiers")) tiers = j.at("tiers").get<std::vector<std::string>>();
  if (j.contains("providers")) providers = j.at("providers").get<std::vector<std::uint32_t>>();
  if (j.contains("params")) overlay_params(&params, j.at("params"));
  if (j.contains("maut_priorities")) {
    auto v = j.at("maut_priorities").get<std::vector<double>>();
    if (v.size() != eval::kFactorCount) {
      throw ValidationError("maut_priorities needs exactly " +
                            std::to_string(eval::kFactorCount) + " values");
    }
    std::array<double, eval::kFactorCount> arr{};
    std::copy(v.begin(), v.end(), arr.begin());
    maut_priorities = arr;
  }
  if (j.contains("latency")) latency = sim::LatencyModel::from_json(j.at("latency"));
  if (j.contains("sweep_interval_ms")) sweep_interval_ms = j.at("sweep_interval_ms").get<DurationMs>();
  if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out")) out_dir = j.at("out").get<std::string>();
  if (j.contains("workers")) workers = j.at("workers").get<unsigned>();
  if (j.contains("log_actions")) log_actions = j.at("log_actions").get<bool>();
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = {
      {"scenario", scenario},
      {"corpus", corpus_to_json(corpus)},
      {"trace", trace_to_json(trace)},
      {"policy", policy},
      {"params", params_to_json(params)},
      {"latency", latency.to_json()},
      {"sweep_interval_ms", sweep_interval_ms},
      {"seed", seed},
      {"out", out_dir},
      {"workers", workers},
      {"log_actions", log_actions},
  };
  if (!policies.empty()) j["policies"] = policies;
  if (!capacities.empty()) j["capacities"] = capacities;
  if (!tiers.empty()) j["tiers"] = tiers;
  if (!providers.empty()) j["providers"] = providers;
  if (maut_priorities) {
    j["maut_priorities"] = std::vector<double>(maut_priorities->begin(), maut_priorities->end());
  }
  return j;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  return build_config(j, 0);
}

void RunConfig::validate() const {
  if (scenario < 0 || scenario > 4) {
    throw ValidationError("scenario must be 1..4 (or 0 for none)");
  }
  if (!policy::is_known_policy(policy)) {
    throw ValidationError("unknown policy '" + policy + "'");
  }
  for (const std::string& p : policies) {
    if (!policy::is_known_policy(p)) throw ValidationError("unknown policy '" + p + "'");
  }
  for (const std::string& t : tiers) workload::tier_by_name(t);
  for (std::uint32_t p : providers) {
    if (p == 0) throw ValidationError("provider count must be >= 1");
  }
  if (!corpus.path) {
    if (corpus.gen.n_items == 0) throw ValidationError("corpus needs at least one item");
    if (corpus.gen.lifetime_lo_ms <= 0 || corpus.gen.lifetime_hi_ms < corpus.gen.lifetime_lo_ms) {
      throw ValidationError("bad corpus lifetime range");
    }
  }
  if (!trace.path) {
    if (trace.profile == TraceSpec::Profile::kPoisson) {
      workload::tier_by_name(trace.tier);
      if (trace.minutes <= 0.0) throw ValidationError("trace minutes must be > 0");
    } else {
      if (trace.expected_total <= 0.0) throw ValidationError("expected_total must be > 0");
      if (trace.peak_boost <= 0.0) throw ValidationError("peak_boost must be > 0");
    }
    if (trace.consumers == 0) throw ValidationError("need at least one consumer");
  }
  if (maut_priorities) {
    for (double v : *maut_priorities) {
      if (v <= 0.0) throw ValidationError("maut_priorities must be positive");
    }
  }
  if (sweep_interval_ms <= 0) throw ValidationError("sweep interval must be > 0");
  params.validate();
  latency.validate();
}

policy::PolicyParams RunConfig::resolved_params(double* consistency_ratio) const {
  if (consistency_ratio) *consistency_ratio = 0.0;
  policy::PolicyParams p = params;
  if (p.maut_weights.w.empty() && maut_priorities) {
    eval::AhpResult r = eval::ahp_weights(eval::AhpMatrix::from_priorities(
        std::span<const double>(maut_priorities->data(), maut_priorities->size())));
    p.maut_weights = r.weights;
    if (consistency_ratio) *consistency_ratio = r.consistency_ratio;
  }
  return p;
}

// ---- scenario presets --------------------------------------------------------------

namespace {

RunConfig preset_base() {
  RunConfig c;
  c.corpus.gen.n_attributes = 1400;
  c.corpus.gen.n_items = 400;
  c.trace.consumers = 100;
  c.params.capacity_units = 500;
  return c;
}

std::vector<ScenarioPreset> build_presets() {
  std::vector<ScenarioPreset> presets;

  {
    ScenarioPreset s;
    s.number = 1;
    s.name = "high-freshness";
    s.blurb = "Rapidly changing context: short validity lifetimes, timeliness-weighted "
              "utility, one diurnal day of queries.";
    RunConfig c = preset_base();
    c.scenario = 1;
    c.corpus.gen.lifetime_lo_ms = 90'000;
    c.corpus.gen.lifetime_hi_ms = 300'000;
    c.trace.profile = TraceSpec::Profile::kDiurnal;
    c.trace.expected_total = 70'000.0;
    c.trace.popularity.zipf_s = 0.8;
    c.maut_priorities = {{0.20, 0.12, 0.08, 0.12, 0.08, 0.32, 0.08}};
    c.capacities = {50, 250, 500, 750, 1000};
    c.out_dir = "out/s1";
    s.config = c;
    presets.push_back(std::move(s));
  }

  {
    ScenarioPreset s;
    s.number = 2;
    s.name = "high-demand";
    s.blurb = "Demand surges on a few hot items: sharpened popularity skew, boosted "
              "peaks, longer lifetimes, access-weighted utility.";
    RunConfig c = preset_base();
    c.scenario = 2;
    c.corpus.gen.lifetime_lo_ms = 600'000;
    c.corpus.gen.lifetime_hi_ms = 1'800'000;
    c.trace.profile = TraceSpec::Profile::kDiurnal;
    c.trace.expected_total = 70'000.0;
    c.trace.peak_boost = 1.5;
    c.trace.popularity.zipf_s = 1.2;
    c.maut_priorities = {{0.35, 0.13, 0.08, 0.12, 0.08, 0.16, 0.08}};
    c.capacities = {50, 250, 500, 750, 1000};
    c.out_dir = "out/s2";
    s.config = c;
    presets.push_back(std::move(s));
  }

  {
    ScenarioPreset s;
    s.number = 3;
    s.name = "balanced";
    s.blurb = "Typical conditions: freshness and access probability weighted equally, "
              "gaussian popularity over ranks, medium lifetimes.";
    RunConfig c = preset_base();
    c.scenario = 3;
    c.corpus.gen.lifetime_lo_ms = 300'000;
    c.corpus.gen.lifetime_hi_ms = 900'000;
    c.trace.profile = TraceSpec::Profile::kDiurnal;
    c.trace.expected_total = 70'000.0;
    c.trace.popularity.kind = workload::PopularityModel::Kind::kNormalRank;
    c.maut_priorities = {{0.24, 0.12, 0.08, 0.12, 0.08, 0.24, 0.12}};
    c.params.combine_weight_poa = 0.5;
    c.capacities = {50, 250, 500, 750, 1000};
    c.out_dir = "out/s3";
    s.config = c;
    presets.push_back(std::move(s));
  }

  {
    ScenarioPreset s;
    s.number = 4;
    s.name = "scalability";
    s.blurb = "Load scaling: provider count swept 30 to 100 with steady-rate tiers at "
              "30/60/120 queries per minute.";
    RunConfig c = preset_base();
    c.scenario = 4;
    c.corpus.providers = 100;
    c.corpus.gen.lifetime_lo_ms = 120'000;
    c.corpus.gen.lifetime_hi_ms = 600'000;
    c.trace.profile = TraceSpec::Profile::kPoisson;
    c.trace.tier = "high";
    c.trace.minutes = 60.0;
    c.providers = {30, 65, 100};
    c.tiers = {"low", "medium", "high"};
    c.capacities = {500};
    c.out_dir = "out/s4";
    s.config = c;
    presets.push_back(std::move(s));
  }

  return presets;
}

}  // namespace

const std::vector<ScenarioPreset>& scenario_presets() {
  static const std::vector<ScenarioPreset> presets = build_presets();
  return presets;
}

const ScenarioPreset& scenario_preset(int number) {
  for (const ScenarioPreset& p : scenario_presets()) {
    if (p.number == number) return p;
  }
  throw ValidationError("unknown scenario " + std::to_string(number) + "; presets are 1..4");
}

RunConfig build_config(const nlohmann::json& file_json, int scenario_flag) {
  int scen = scenario_flag;
  if (scen == 0 && file_json.contains("scenario")) {
    scen = file_json.at("scenario").get<int>();
  }
  RunConfig cfg = scen != 0 ? scenario_preset(scen).config : RunConfig{};
  cfg.scenario = scen;
  cfg.overlay(file_json);
  return cfg;
}

// ---- materialization ----------------------------------------------------------------

context::Corpus materialize_corpus(const RunConfig& cfg,
                                   std::optional<std::uint32_t> providers_override,
                                   std::uint64_t seed) {
  if (cfg.corpus.path) {
    if (providers_override) {
      throw ValidationError("provider sweep needs a generated corpus, not a corpus file");
    }
    return context::Corpus::load_file(*cfg.corpus.path);
  }
  workload::CorpusGenSpec g = cfg.corpus.gen;
  std::string key = "corpus";
  std::optional<std::uint32_t> prov =
      providers_override ? providers_override : cfg.corpus.providers;
  if (prov) {
    g.n_items = 2 * *prov;
    g.n_attributes = 7 * *prov;
    key += "/providers=" + std::to_string(*prov);
  }
  g.seed = derive_seed(seed, key);
  return workload::gen_corpus(g);
}

workload::Trace materialize_trace(const RunConfig& cfg, const context::Corpus& corpus,
                                  std::optional<std::string> tier_override,
                                  std::optional<std::uint32_t> providers_override,
                                  std::uint64_t seed) {
  if (cfg.trace.path) {
    if (tier_override) {
      throw ValidationError("tier sweep needs a generated trace, not a trace file");
    }
    return workload::Trace::load_csv(*cfg.trace.path);
  }
  const TraceSpec& t = cfg.trace;
  std::string key = "trace";
  bool poisson = t.profile == TraceSpec::Profile::kPoisson || tier_override.has_value();
  std::string tier_name = tier_override ? *tier_override : t.tier;
  if (poisson) key += "/tier=" + tier_name;
  if (providers_override) key += "/providers=" + std::to_string(*providers_override);
  std::uint64_t trace_seed = derive_seed(seed, key);

  if (poisson) {
    workload::LoadTier tier = workload::tier_by_name(tier_name);
    auto duration = static_cast<DurationMs>(t.minutes * 60'000.0);
    return workload::gen_poisson_trace(corpus, t.popularity, tier, duration, t.consumers,
                                       trace_seed);
  }
  workload::DiurnalProfile profile =
      workload::DiurnalProfile::standard(t.expected_total, t.peak_boost);
  return workload::gen_diurnal_trace(corpus, t.popularity, profile, t.consumers, trace_seed);
}

}  // namespace ctxcache::config
