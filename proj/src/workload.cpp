#include "ctxcache/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ctxcache/rng.hpp"

namespace ctxcache::workload {

// ---- tiers -------------------------------------------------------------------

const std::vector<LoadTier>& standard_tiers() {
  static const std::vector<LoadTier> tiers = {
      {"low", 0.5}, {"medium", 1.0}, {"high", 2.0}};
  return tiers;
}

LoadTier tier_by_name(const std::string& name) {
  for (const LoadTier& t : standard_tiers()) {
    if (t.name == name) return t;
  }
  throw ValidationError("unknown load tier '" + name + "'; valid tiers: low medium high");
}

// ---- diurnal profile -----------------------------------------------------------

namespace {
constexpr DurationMs kSlotMs = 30 * 60 * 1000;

bool is_peak_slot(std::size_t slot) {
  // 6:00-11:00 and 15:00-18:00, in half-hour slots.
  return (slot >= 12 && slot < 22) || (slot >= 30 && slot < 36);
}
}  // namespace

DiurnalProfile DiurnalProfile::standard(double expected_total, double peak_boost) {
  if (expected_total <= 0.0) throw ValidationError("expected daily total must be > 0");
  if (peak_boost <= 0.0) throw ValidationError("peak boost must be > 0");
  // Base shape: peak slots at mu 5250 / sigma 500, off-peak at 1750 / 300.
  // The residual factor that lands the expected daily total on target is
  // computed from the shape, never hand-tuned.
  DiurnalProfile p;
  double shape_total = 0.0;
  for (std::size_t s = 0; s < p.slots.size(); ++s) {
    double mu = is_peak_slot(s) ? 5250.0 * peak_boost : 1750.0;
    double sigma = is_peak_slot(s) ? 500.0 * peak_boost : 300.0;
    p.slots[s] = {mu, sigma};
    shape_total += mu;
  }
  double scale = expected_total / shape_total;
  for (SlotProfile& s : p.slots) {
    s.mu *= scale;
    s.sigma *= scale;
  }
  return p;
}

double DiurnalProfile::expected_total() const {
  double total = 0.0;
  for (const SlotProfile& s : slots) total += s.mu;
  return total;
}

// ---- popularity ----------------------------------------------------------------

TargetSampler::TargetSampler(const context::Corpus& corpus, const PopularityModel& model,
                             std::uint64_t seed) {
  std::size_t n = corpus.targets().size();
  if (n == 0) throw ValidationError("corpus has no targets");
  rank_to_target_.resize(n);
  for (std::size_t i = 0; i < n; ++i) rank_to_target_[i] = static_cast<std::uint32_t>(i);

  // Which target gets which popularity rank is part of the workload seed.
  Rng rng(splitmix64(seed ^ 0x9d2c5f1bu));
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = rng.uniform_index(i);
    std::swap(rank_to_target_[i - 1], rank_to_target_[j]);
  }

  cumulative_.resize(n);
  double total = 0.0;
  double sigma = model.normal_sigma_ranks > 0.0 ? model.normal_sigma_ranks
                                                : static_cast<double>(n) / 3.0;
  for (std::size_t r = 0; r < n; ++r) {
    double w;
    if (model.kind == PopularityModel::Kind::kZipf) {
      if (model.zipf_s < 0.0) throw ValidationError("zipf exponent must be >= 0");
      w = std::pow(static_cast<double>(r + 1), -model.zipf_s);
    } else {
      double z = static_cast<double>(r) / sigma;
      w = std::exp(-0.5 * z * z);
    }
    total += w;
    cumulative_[r] = total;
  }
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;  // guard against rounding
}

std::uint32_t TargetSampler::sample(double u) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t rank = std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1);
  return rank_to_target_[rank];
}

double TargetSampler::rank_probability(std::size_t rank) const {
  double lo = rank == 0 ? 0.0 : cumulative_[rank - 1];
  return cumulative_[rank] - lo;
}

// ---- trace generation -----------------------------------------------------------

namespace {

std::string consumer_name(std::uint64_t ix) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "c%03llu", static_cast<unsigned long long>(ix));
  return buf;
}

QueryEvent make_event(const context::Corpus& corpus, const TargetSampler& sampler,
                      std::uint32_t n_consumers, Rng& rng, TimeMs ts) {
  std::uint32_t target = sampler.sample(rng.uniform01());
  const context::Target& t = corpus.targets()[target];
  QueryEvent e;
  e.timestamp_ms = ts;
  e.is_item = t.is_item;
  e.target_id = t.id;
  e.consumer_id = consumer_name(rng.uniform_index(n_consumers));
  return e;
}

void finalize_trace(Trace& trace) {
  std::stable_sort(trace.events.begin(), trace.events.end(),
                   [](const QueryEvent& a, const QueryEvent& b) {
                     return a.timestamp_ms < b.timestamp_ms;
                   });
  for (std::size_t i = 0; i < trace.events.size(); ++i) trace.events[i].seq = i;
}

}  // namespace

Trace gen_poisson_trace(const context::Corpus& corpus, const PopularityModel& model,
                        const LoadTier& tier, DurationMs duration_ms,
                        std::uint32_t n_consumers, std::uint64_t seed) {
  if (duration_ms < 0) throw ValidationError("trace duration is negative");
  if (tier.lambda_qps <= 0.0) throw ValidationError("tier rate must be > 0");
  if (n_consumers == 0) throw ValidationError("need at least one consumer");
  TargetSampler sampler(corpus, model, seed);
  Rng rng(seed);

  Trace trace;
  double rate_per_ms = tier.lambda_qps / 1000.0;
  double t = 0.0;
  while (true) {
    t += rng.exponential(rate_per_ms);
    if (t >= static_cast<double>(duration_ms)) break;
    trace.events.push_back(
        make_event(corpus, sampler, n_consumers, rng, static_cast<TimeMs>(t)));
  }
  finalize_trace(trace);
  return trace;
}

Trace gen_diurnal_trace(const context::Corpus& corpus, const PopularityModel& model,
                        const DiurnalProfile& profile, std::uint32_t n_consumers,
                        std::uint64_t seed) {
  if (n_consumers == 0) throw ValidationError("need at least one consumer");
  TargetSampler sampler(corpus, model, seed);
  Rng rng(seed);

  Trace trace;
  for (std::size_t slot = 0; slot < profile.slots.size(); ++slot) {
    const SlotProfile& sp = profile.slots[slot];
    double drawn = sp.sigma > 0.0 ? rng.normal(sp.mu, sp.sigma) : sp.mu;
    auto count = static_cast<std::int64_t>(std::llround(std::max(0.0, drawn)));
    TimeMs slot_start = static_cast<TimeMs>(slot) * kSlotMs;
    for (std::int64_t i = 0; i < count; ++i) {
      TimeMs ts = slot_start + static_cast<TimeMs>(rng.uniform01() * kSlotMs);
      trace.events.push_back(make_event(corpus, sampler, n_consumers, rng, ts));
    }
  }
  finalize_trace(trace);
  return trace;
}

// ---- trace CSV -------------------------------------------------------------------

std::string Trace::to_csv() const {
  std::ostringstream out;
  out << kVersionLine << '\n' << kHeaderLine << '\n';
  for (const QueryEvent& e : events) {
    out << e.seq << ',' << e.timestamp_ms << ',' << (e.is_item ? "item" : "attribute") << ','
        << e.target_id << ',' << e.consumer_id << '\n';
  }
  return out.str();
}

void Trace::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write trace file: " + path);
  out << to_csv();
}

Trace Trace::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kVersionLine) {
    throw ValidationError("trace file missing version line");
  }
  if (!std::getline(in, line) || line != kHeaderLine) {
    throw ValidationError("trace file missing header line");
  }
  Trace trace;
  std::uint64_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 5> field;
    std::size_t start = 0;
    for (std::size_t f = 0; f < 5; ++f) {
      std::size_t comma = line.find(',', start);
      if (f < 4 && comma == std::string::npos) {
        throw ValidationError("trace row has too few fields");
      }
      field[f] = line.substr(start, comma == std::string::npos ? comma : comma - start);
      start = comma + 1;
    }
    QueryEvent e;
    e.seq = std::stoull(field[0]);
    e.timestamp_ms = std::stoll(field[1]);
    if (field[2] == "item") {
      e.is_item = true;
    } else if (field[2] == "attribute") {
      e.is_item = false;
    } else {
      throw ValidationError("trace row has unknown kind: " + field[2]);
    }
    e.target_id = field[3];
    e.consumer_id = field[4];
    if (e.timestamp_ms < 0) throw ValidationError("trace timestamp is negative");
    if (!trace.events.empty() && e.timestamp_ms < trace.events.back().timestamp_ms) {
      throw ValidationError("trace is not sorted by timestamp");
    }
    if (e.seq != row) throw ValidationError("trace sequence numbers are not contiguous");
    ++row;
    trace.events.push_back(std::move(e));
  }
  return trace;
}

Trace Trace::load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open trace file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_csv(buf.str());
}

// ---- corpus generator --------------------------------------------------------------

namespace {

std::string site_id(const char* prefix, std::uint32_t site) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s_%04u", prefix, site);
  return buf;
}

DurationMs draw_lifetime(Rng& rng, const CorpusGenSpec& spec) {
  return static_cast<DurationMs>(rng.uniform(static_cast<double>(spec.lifetime_lo_ms),
                                             static_cast<double>(spec.lifetime_hi_ms)));
}

context::ContextAttribute make_attr(std::string id, context::ValueKind kind,
                                    std::string unit, context::AttributeValue value,
                                    Rng& rng, const CorpusGenSpec& spec) {
  context::ContextAttribute a;
  a.def.id = std::move(id);
  a.def.kind = kind;
  a.def.unit = std::move(unit);
  a.value = std::move(value);
  a.validity_lifetime_ms = draw_lifetime(rng, spec);
  a.decay_lambda_per_ms = std::log(2.0) / static_cast<double>(a.validity_lifetime_ms);
  return a;
}

eval::FactorArray draw_utility(Rng& rng) {
  eval::FactorArray u{};
  u[eval::kFactorPoa] = 0.0;  // filled live by the evaluation engine
  u[eval::kFactorQos] = rng.uniform(0.5, 1.0);
  u[eval::kFactorCoc] = rng.uniform(1.0, 10.0);
  u[eval::kFactorQoc] = rng.uniform(0.5, 1.0);
  u[eval::kFactorSla] = rng.uniform(1.0, 5.0);
  u[eval::kFactorTimeliness] = rng.uniform(0.0, 1.0);
  u[eval::kFactorProviderType] = 0.3 * (1.0 + static_cast<double>(rng.uniform_index(3)));
  return u;
}

}  // namespace

context::Corpus gen_corpus(const CorpusGenSpec& spec) {
  if (spec.n_items == 0) throw ValidationError("corpus needs at least one item");
  if (spec.lifetime_lo_ms <= 0 || spec.lifetime_hi_ms < spec.lifetime_lo_ms) {
    throw ValidationError("bad lifetime range");
  }
  Rng rng(spec.seed);
  context::Corpus corpus;

  std::uint32_t sites = (spec.n_items + 1) / 2;
  std::uint32_t items_made = 0;
  std::uint32_t attrs_made = 0;

  for (std::uint32_t s = 0; s < sites; ++s) {
    std::string sign = site_id("rw_sign", s);
    std::string speed = site_id("speed_limit", s);
    std::string congestion = site_id("congestion", s);
    std::string raining = site_id("raining", s);
    std::string visibility = site_id("visibility", s);
    std::string location = site_id("location", s);
    std::string observed = site_id("observed_at", s);

    corpus.add_attribute(make_attr(sign, context::ValueKind::kBoolean, "",
                                   rng.bernoulli(0.5), rng, spec));
    corpus.add_attribute(make_attr(speed, context::ValueKind::kNumber, "km/h",
                                   20.0 + 10.0 * static_cast<double>(rng.uniform_index(9)),
                                   rng, spec));
    corpus.add_attribute(make_attr(congestion, context::ValueKind::kNumber, "vehicles/km",
                                   rng.uniform(0.0, 160.0), rng, spec));
    corpus.add_attribute(make_attr(raining, context::ValueKind::kBoolean, "",
                                   rng.bernoulli(0.4), rng, spec));
    corpus.add_attribute(make_attr(visibility, context::ValueKind::kNumber, "m",
                                   rng.uniform(10.0, 200.0), rng, spec));
    corpus.add_attribute(make_attr(
        location, context::ValueKind::kCoordinate, "",
        context::Coordinate{rng.uniform(-38.5, -37.5), rng.uniform(144.5, 145.5)}, rng,
        spec));
    corpus.add_attribute(make_attr(observed, context::ValueKind::kTimestamp, "",
                                   context::TimeValue{0}, rng, spec));
    attrs_made += 7;

    // Road-work detection: advisory sign up, speed limit lowered, congestion
    // above the density threshold.
    if (items_made < spec.n_items) {
      context::ContextItem rw;
      rw.id = site_id("roadwork", s);
      rw.attribute_ids = {sign, speed, congestion};
      rw.rule.conjuncts = {
          {sign, context::BoolEquals{true}, false},
          {speed, context::Interval{-std::numeric_limits<double>::infinity(), 40.0, true, true},
           false},
          {congestion,
           context::Interval{80.0, std::numeric_limits<double>::infinity(), true, true},
           false},
      };
      rw.rule.output = true;
      rw.validity_lifetime_ms = draw_lifetime(rng, spec);
      rw.decay_lambda_per_ms = std::log(2.0) / static_cast<double>(rw.validity_lifetime_ms);
      corpus.add_item(std::move(rw));
      ++items_made;
    }

    // Hierarchical hazard item on top of the roadwork item.
    if (items_made < spec.n_items) {
      context::ContextItem hz;
      hz.id = site_id("hazard", s);
      std::string rw_id = site_id("roadwork", s);
      hz.attribute_ids = {rw_id, raining, visibility};
      hz.rule.conjuncts = {
          {rw_id, context::BoolEquals{true}, false},
          {raining, context::BoolEquals{true}, false},
          {visibility,
           context::Interval{-std::numeric_limits<double>::infinity(), 50.0, true, true},
           false},
      };
      hz.rule.output = std::string("high_hazard");
      hz.validity_lifetime_ms = draw_lifetime(rng, spec);
      hz.decay_lambda_per_ms = std::log(2.0) / static_cast<double>(hz.validity_lifetime_ms);
      corpus.add_item(std::move(hz));
      ++items_made;
    }
  }

  // Standalone padding attributes up to the requested attribute count.
  for (std::uint32_t k = attrs_made; k < spec.n_attributes; ++k) {
    corpus.add_attribute(make_attr(site_id("aux", k), context::ValueKind::kNumber, "",
                                   rng.uniform(0.0, 1.0), rng, spec));
  }

  corpus.finalize();
  for (const context::Target& t : corpus.targets()) {
    corpus.set_utility(t.id, draw_utility(rng));
  }
  corpus.finalize();
  return corpus;
}

}  // namespace ctxcache::workload
