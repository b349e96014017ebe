#include "ctxcache/context_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

namespace ctxcache::context {

using nlohmann::json;

// ---- values ----------------------------------------------------------------

const char* to_string(ValueKind k) {
  switch (k) {
    case ValueKind::kBoolean: return "boolean";
    case ValueKind::kNumber: return "number";
    case ValueKind::kCoordinate: return "coordinate";
    case ValueKind::kTimestamp: return "timestamp";
  }
  return "?";
}

ValueKind kind_from_string(std::string_view s) {
  if (s == "boolean") return ValueKind::kBoolean;
  if (s == "number") return ValueKind::kNumber;
  if (s == "coordinate") return ValueKind::kCoordinate;
  if (s == "timestamp") return ValueKind::kTimestamp;
  throw ValidationError("unknown attribute kind: " + std::string(s));
}

ValueKind kind_of(const AttributeValue& v) {
  switch (v.index()) {
    case 0: return ValueKind::kBoolean;
    case 1: return ValueKind::kNumber;
    case 2: return ValueKind::kCoordinate;
    default: return ValueKind::kTimestamp;
  }
}

void validate_value(const AttributeValue& v) {
  if (const auto* c = std::get_if<Coordinate>(&v)) {
    if (c->latitude < -90.0 || c->latitude > 90.0) {
      throw ValidationError("latitude outside [-90, 90]");
    }
    if (c->longitude < -180.0 || c->longitude > 180.0) {
      throw ValidationError("longitude outside [-180, 180]");
    }
  } else if (const auto* t = std::get_if<TimeValue>(&v)) {
    if (t->ms < 0) throw ValidationError("timestamp value is negative");
  } else if (const auto* d = std::get_if<double>(&v)) {
    if (!std::isfinite(*d)) throw ValidationError("number value is not finite");
  }
}

// ---- regions ---------------------------------------------------------------

namespace {

bool in_interval(double x, const Interval& iv) {
  bool lo_ok = iv.lo_closed ? x >= iv.lo : x > iv.lo;
  bool hi_ok = iv.hi_closed ? x <= iv.hi : x < iv.hi;
  return lo_ok && hi_ok;
}

[[noreturn]] void kind_mismatch(const AttributeValue& v, const char* region_kind) {
  throw KindMismatchError(std::string("cannot test a ") + to_string(kind_of(v)) +
                          " value against a " + region_kind + " region");
}

}  // namespace

bool evaluate_region(const AttributeValue& value, const Region& region) {
  if (const auto* be = std::get_if<BoolEquals>(&region)) {
    if (const bool* b = std::get_if<bool>(&value)) return *b == be->value;
    kind_mismatch(value, "boolean-equality");
  }
  if (const auto* iv = std::get_if<Interval>(&region)) {
    if (const double* d = std::get_if<double>(&value)) return in_interval(*d, *iv);
    if (const auto* t = std::get_if<TimeValue>(&value)) {
      return in_interval(static_cast<double>(t->ms), *iv);
    }
    kind_mismatch(value, "interval");
  }
  const auto& bb = std::get<BoundingBox>(region);
  if (const auto* c = std::get_if<Coordinate>(&value)) {
    return c->latitude >= bb.lat_lo && c->latitude <= bb.lat_hi &&
           c->longitude >= bb.lon_lo && c->longitude <= bb.lon_hi;
  }
  kind_mismatch(value, "bounding-box");
}

// ---- region / value JSON ----------------------------------------------------

json region_to_json(const Region& r) {
  json j;
  if (const auto* be = std::get_if<BoolEquals>(&r)) {
    j["type"] = "bool_equals";
    j["value"] = be->value;
  } else if (const auto* iv = std::get_if<Interval>(&r)) {
    j["type"] = "interval";
    if (std::isfinite(iv->lo)) j["lo"] = iv->lo;
    if (std::isfinite(iv->hi)) j["hi"] = iv->hi;
    j["lo_closed"] = iv->lo_closed;
    j["hi_closed"] = iv->hi_closed;
  } else {
    const auto& bb = std::get<BoundingBox>(r);
    j["type"] = "bbox";
    j["lat_lo"] = bb.lat_lo;
    j["lat_hi"] = bb.lat_hi;
    j["lon_lo"] = bb.lon_lo;
    j["lon_hi"] = bb.lon_hi;
  }
  return j;
}

Region region_from_json(const json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "bool_equals") {
    return BoolEquals{j.at("value").get<bool>()};
  }
  if (type == "interval") {
    Interval iv;
    if (j.contains("lo")) iv.lo = j.at("lo").get<double>();
    if (j.contains("hi")) iv.hi = j.at("hi").get<double>();
    iv.lo_closed = j.value("lo_closed", true);
    iv.hi_closed = j.value("hi_closed", true);
    if (iv.lo > iv.hi) throw ValidationError("interval lo > hi");
    return iv;
  }
  if (type == "bbox") {
    BoundingBox bb;
    bb.lat_lo = j.at("lat_lo").get<double>();
    bb.lat_hi = j.at("lat_hi").get<double>();
    bb.lon_lo = j.at("lon_lo").get<double>();
    bb.lon_hi = j.at("lon_hi").get<double>();
    if (bb.lat_lo > bb.lat_hi || bb.lon_lo > bb.lon_hi) {
      throw ValidationError("bounding box lo > hi");
    }
    return bb;
  }
  throw ValidationError("unknown region type: " + type);
}

namespace {

json value_to_json(const AttributeValue& v) {
  if (const bool* b = std::get_if<bool>(&v)) return *b;
  if (const double* d = std::get_if<double>(&v)) return *d;
  if (const auto* c = std::get_if<Coordinate>(&v)) {
    return json{{"lat", c->latitude}, {"lon", c->longitude}};
  }
  const auto& t = std::get<TimeValue>(v);
  return json{{"ts_ms", t.ms}};
}

AttributeValue value_from_json(const json& j, ValueKind kind) {
  switch (kind) {
    case ValueKind::kBoolean: return j.get<bool>();
    case ValueKind::kNumber: return j.get<double>();
    case ValueKind::kCoordinate:
      return Coordinate{j.at("lat").get<double>(), j.at("lon").get<double>()};
    case ValueKind::kTimestamp: return TimeValue{j.at("ts_ms").get<TimeMs>()};
  }
  throw ValidationError("bad value kind");
}

json output_to_json(const RuleOutput& o) {
  if (const bool* b = std::get_if<bool>(&o)) return *b;
  return std::get<std::string>(o);
}

RuleOutput output_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_string()) return j.get<std::string>();
  throw ValidationError("rule output must be a boolean or a label");
}

constexpr DurationMs kForeverMs = std::numeric_limits<DurationMs>::max() / 4;

// Default staleness rate when the corpus does not pin one: the confidence in
// a value halves over one validity lifetime.
double default_lambda(DurationMs lifetime_ms) {
  return std::log(2.0) / static_cast<double>(lifetime_ms);
}

}  // namespace

// ---- corpus construction ----------------------------------------------------

void Corpus::add_attribute(ContextAttribute a) {
  if (a.def.id.empty()) throw ValidationError("attribute id is empty");
  if (attributes_.count(a.def.id) || items_.count(a.def.id)) {
    throw ValidationError("duplicate id in corpus: " + a.def.id);
  }
  if (kind_of(a.value) != a.def.kind) {
    throw ValidationError("attribute value kind mismatch for " + a.def.id);
  }
  validate_value(a.value);
  if (a.last_update < 0) throw ValidationError("attribute last_update is negative");
  if (a.validity_lifetime_ms <= 0) {
    throw ValidationError("attribute validity lifetime must be > 0");
  }
  if (a.decay_lambda_per_ms < 0.0) throw ValidationError("attribute decay rate is negative");
  attributes_.emplace(a.def.id, std::move(a));
  finalized_ = false;
}

void Corpus::add_item(ContextItem i) {
  if (i.id.empty()) throw ValidationError("item id is empty");
  if (attributes_.count(i.id) || items_.count(i.id)) {
    throw ValidationError("duplicate id in corpus: " + i.id);
  }
  if (i.attribute_ids.empty()) throw ValidationError("item has no dependencies: " + i.id);
  if (i.rule.conjuncts.empty()) throw ValidationError("item rule has no conjuncts: " + i.id);
  if (i.validity_lifetime_ms <= 0) {
    throw ValidationError("item validity lifetime must be > 0");
  }
  if (i.decay_lambda_per_ms < 0.0) throw ValidationError("item decay rate is negative");

  // The declared dependency list and the rule's references must agree.
  std::set<std::string> declared(i.attribute_ids.begin(), i.attribute_ids.end());
  std::set<std::string> referenced;
  for (const Conjunct& c : i.rule.conjuncts) referenced.insert(c.ref_id);
  if (declared != referenced) {
    throw ValidationError("item dependency list does not match rule references: " + i.id);
  }
  items_.emplace(i.id, std::move(i));
  finalized_ = false;
}

void Corpus::set_utility(const std::string& target_id, const eval::FactorArray& u) {
  utility_[target_id] = u;
  finalized_ = false;
}

void Corpus::finalize() {
  // 1. References must resolve.
  for (const auto& [id, item] : items_) {
    for (const std::string& ref : item.attribute_ids) {
      if (!attributes_.count(ref) && !items_.count(ref)) throw MissingAttributeError(ref);
      if (ref == id) throw CycleError("item depends on itself: " + id);
    }
  }
  for (const auto& [id, u] : utility_) {
    if (!attributes_.count(id) && !items_.count(id)) throw MissingAttributeError(id);
    (void)u;
  }

  // 2. Topological order over item-to-item references (Kahn; ties resolved
  //    in id order so the order is deterministic).
  std::map<std::string, std::vector<std::string>> dependants;  // item -> items using it
  std::map<std::string, std::size_t> indegree;
  for (const auto& [id, item] : items_) {
    indegree[id] = 0;
  }
  for (const auto& [id, item] : items_) {
    for (const std::string& ref : item.attribute_ids) {
      if (items_.count(ref)) {
        dependants[ref].push_back(id);
        ++indegree[id];
      }
    }
  }
  std::set<std::string> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.insert(id);
  }
  topo_items_.clear();
  while (!ready.empty()) {
    std::string id = *ready.begin();
    ready.erase(ready.begin());
    topo_items_.push_back(id);
    for (const std::string& dep : dependants[id]) {
      if (--indegree[dep] == 0) ready.insert(dep);
    }
  }
  if (topo_items_.size() != items_.size()) {
    throw CycleError("item references form a cycle");
  }

  // 3. Transitive attribute inputs per item, in topological order.
  transitive_inputs_.clear();
  for (const std::string& id : topo_items_) {
    std::set<std::string> inputs;
    for (const std::string& ref : items_.at(id).attribute_ids) {
      if (attributes_.count(ref)) {
        inputs.insert(ref);
      } else {
        const auto& sub = transitive_inputs_.at(ref);
        inputs.insert(sub.begin(), sub.end());
      }
    }
    transitive_inputs_[id] = std::vector<std::string>(inputs.begin(), inputs.end());
  }

  // 4. Flattened target table, sorted by id (maps iterate sorted).
  targets_.clear();
  target_index_.clear();
  eval::FactorArray default_u{};
  {
    const eval::FactorSpecs specs = eval::default_factor_specs();
    for (std::size_t f = 0; f < eval::kFactorCount; ++f) {
      default_u[f] = 0.5 * (specs[f].min + specs[f].max);
    }
    default_u[eval::kFactorPoa] = 0.0;
  }
  auto utility_for = [&](const std::string& id) {
    auto it = utility_.find(id);
    return it != utility_.end() ? it->second : default_u;
  };
  std::vector<std::string> all_ids;
  for (const auto& [id, a] : attributes_) all_ids.push_back(id);
  for (const auto& [id, i] : items_) all_ids.push_back(id);
  std::sort(all_ids.begin(), all_ids.end());
  for (const std::string& id : all_ids) {
    Target t;
    t.id = id;
    if (auto it = items_.find(id); it != items_.end()) {
      t.is_item = true;
      t.validity_lifetime_ms = it->second.validity_lifetime_ms;
      t.decay_lambda_per_ms = it->second.decay_lambda_per_ms;
    } else {
      const ContextAttribute& a = attributes_.at(id);
      t.validity_lifetime_ms = a.validity_lifetime_ms;
      t.decay_lambda_per_ms = a.decay_lambda_per_ms;
    }
    t.static_utility = utility_for(id);
    target_index_.emplace(id, static_cast<std::uint32_t>(targets_.size()));
    targets_.push_back(std::move(t));
  }
  for (Target& t : targets_) {
    if (!t.is_item) continue;
    for (const std::string& a : transitive_inputs_.at(t.id)) {
      t.input_attr_targets.push_back(target_index_.at(a));
    }
  }

  // 5. How many items each attribute feeds (transitively).
  dependant_items_.assign(targets_.size(), 0);
  for (const Target& t : targets_) {
    for (std::uint32_t a : t.input_attr_targets) ++dependant_items_[a];
  }

  finalized_ = true;
}

void Corpus::require_finalized() const {
  if (!finalized_) throw Error("corpus not finalized");
}

std::uint32_t Corpus::target_index(std::string_view id) const {
  require_finalized();
  auto it = target_index_.find(id);
  return it != target_index_.end() ? it->second : kNoTarget;
}

const Target* Corpus::find_target(std::string_view id) const {
  std::uint32_t ix = target_index(id);
  return ix == kNoTarget ? nullptr : &targets_[ix];
}

std::uint32_t Corpus::dependant_item_count(std::uint32_t attr_target_index) const {
  require_finalized();
  return dependant_items_.at(attr_target_index);
}

// ---- inference ---------------------------------------------------------------

namespace {

bool conjunct_holds(const Conjunct& c, const std::map<std::string, ContextAttribute>& attrs,
                    const std::map<std::string, ContextItem>& items) {
  bool holds;
  if (auto it = attrs.find(c.ref_id); it != attrs.end()) {
    holds = evaluate_region(it->second.value, c.region);
  } else if (auto jt = items.find(c.ref_id); jt != items.end()) {
    // Item references are tested on whether the referenced rule fired.
    holds = evaluate_region(AttributeValue{jt->second.fired}, c.region);
  } else {
    throw MissingAttributeError(c.ref_id);
  }
  return c.negate ? !holds : holds;
}

}  // namespace

InferenceResult Corpus::infer_item(const std::string& item_id, TimeMs now) {
  require_finalized();
  if (!items_.count(item_id)) throw MissingAttributeError(item_id);

  // Collect the transitive item dependencies of item_id, then evaluate them
  // dependency-first so hierarchical rules see up-to-date inputs.
  std::set<std::string> needed;
  std::deque<std::string> queue{item_id};
  while (!queue.empty()) {
    std::string id = queue.front();
    queue.pop_front();
    if (!needed.insert(id).second) continue;
    for (const std::string& ref : items_.at(id).attribute_ids) {
      if (items_.count(ref)) queue.push_back(ref);
    }
  }
  for (const std::string& id : topo_items_) {
    if (!needed.count(id)) continue;
    ContextItem& item = items_.at(id);
    bool fired = true;
    for (const Conjunct& c : item.rule.conjuncts) {
      if (!conjunct_holds(c, attributes_, items_)) {
        fired = false;
        break;
      }
    }
    item.fired = fired;
    item.derived_value = fired ? item.rule.output : RuleOutput{false};
    item.last_inferred = now;
  }

  const ContextItem& item = items_.at(item_id);
  return InferenceResult{*item.derived_value, item.fired, transitive_inputs_.at(item_id)};
}

void Corpus::infer_all(TimeMs now) {
  require_finalized();
  for (const std::string& id : topo_items_) {
    ContextItem& item = items_.at(id);
    bool fired = true;
    for (const Conjunct& c : item.rule.conjuncts) {
      if (!conjunct_holds(c, attributes_, items_)) {
        fired = false;
        break;
      }
    }
    item.fired = fired;
    item.derived_value = fired ? item.rule.output : RuleOutput{false};
    item.last_inferred = now;
  }
}

void Corpus::set_attribute_value(const std::string& attr_id, AttributeValue v, TimeMs now) {
  require_finalized();
  auto it = attributes_.find(attr_id);
  if (it == attributes_.end()) throw MissingAttributeError(attr_id);
  if (kind_of(v) != it->second.def.kind) {
    throw KindMismatchError("new value kind does not match attribute " + attr_id);
  }
  validate_value(v);
  it->second.value = std::move(v);
  it->second.last_update = now;
  invalidate_dependents(attr_id);
}

void Corpus::invalidate_dependents(const std::string& id) {
  for (auto& [item_id, item] : items_) {
    const auto& inputs = transitive_inputs_.at(item_id);
    if (std::binary_search(inputs.begin(), inputs.end(), id)) {
      item.derived_value.reset();
    }
  }
}

// ---- lifetime overrides -------------------------------------------------------

void Corpus::override_lifetimes(DurationMs lifetime_ms, double lambda_per_ms) {
  if (lifetime_ms <= 0) throw ValidationError("lifetime override must be > 0");
  if (lambda_per_ms < 0.0) throw ValidationError("decay override is negative");
  for (auto& [id, a] : attributes_) {
    a.validity_lifetime_ms = lifetime_ms;
    a.decay_lambda_per_ms = lambda_per_ms;
  }
  for (auto& [id, i] : items_) {
    i.validity_lifetime_ms = lifetime_ms;
    i.decay_lambda_per_ms = lambda_per_ms;
  }
  if (finalized_) finalize();
}

void Corpus::make_lifetimes_infinite() {
  override_lifetimes(kForeverMs, 0.0);
}

// ---- JSON ----------------------------------------------------------------------

json Corpus::to_json() const {
  json j;
  j["version"] = 1;
  json attrs = json::array();
  for (const auto& [id, a] : attributes_) {
    json ja;
    ja["id"] = id;
    ja["kind"] = to_string(a.def.kind);
    if (!a.def.unit.empty()) ja["unit"] = a.def.unit;
    if (a.def.acceptable_region) ja["acceptable_region"] = region_to_json(*a.def.acceptable_region);
    ja["value"] = value_to_json(a.value);
    ja["last_update_ms"] = a.last_update;
    ja["validity_lifetime_ms"] = a.validity_lifetime_ms;
    ja["decay_lambda_per_ms"] = a.decay_lambda_per_ms;
    attrs.push_back(std::move(ja));
  }
  j["attributes"] = std::move(attrs);

  json items = json::array();
  for (const auto& [id, i] : items_) {
    json ji;
    ji["id"] = id;
    ji["depends_on"] = i.attribute_ids;
    json rule;
    rule["output"] = output_to_json(i.rule.output);
    json conjuncts = json::array();
    for (const Conjunct& c : i.rule.conjuncts) {
      json jc;
      jc["ref"] = c.ref_id;
      jc["region"] = region_to_json(c.region);
      if (c.negate) jc["negate"] = true;
      conjuncts.push_back(std::move(jc));
    }
    rule["conjuncts"] = std::move(conjuncts);
    ji["rule"] = std::move(rule);
    ji["validity_lifetime_ms"] = i.validity_lifetime_ms;
    ji["decay_lambda_per_ms"] = i.decay_lambda_per_ms;
    items.push_back(std::move(ji));
  }
  j["items"] = std::move(items);

  json utility;
  for (const auto& [id, u] : utility_) {
    utility[id] = json{{"qos", u[eval::kFactorQos]},
                       {"coc", u[eval::kFactorCoc]},
                       {"qoc", u[eval::kFactorQoc]},
                       {"sla", u[eval::kFactorSla]},
                       {"timeliness", u[eval::kFactorTimeliness]},
                       {"provider_type", u[eval::kFactorProviderType]}};
  }
  j["utility"] = std::move(utility);
  return j;
}

Corpus Corpus::from_json(const json& j) {
  if (j.value("version", 0) != 1) throw ValidationError("unsupported corpus version");
  Corpus c;
  for (const json& ja : j.at("attributes")) {
    ContextAttribute a;
    a.def.id = ja.at("id").get<std::string>();
    a.def.kind = kind_from_string(ja.at("kind").get<std::string>());
    a.def.unit = ja.value("unit", std::string{});
    if (ja.contains("acceptable_region")) {
      a.def.acceptable_region = region_from_json(ja.at("acceptable_region"));
    }
    a.value = value_from_json(ja.at("value"), a.def.kind);
    a.last_update = ja.value("last_update_ms", TimeMs{0});
    a.validity_lifetime_ms = ja.at("validity_lifetime_ms").get<DurationMs>();
    a.decay_lambda_per_ms = ja.contains("decay_lambda_per_ms")
                                ? ja.at("decay_lambda_per_ms").get<double>()
                                : default_lambda(a.validity_lifetime_ms);
    c.add_attribute(std::move(a));
  }
  for (const json& ji : j.at("items")) {
    ContextItem i;
    i.id = ji.at("id").get<std::string>();
    i.attribute_ids = ji.at("depends_on").get<std::vector<std::string>>();
    const json& rule = ji.at("rule");
    i.rule.output = output_from_json(rule.at("output"));
    for (const json& jc : rule.at("conjuncts")) {
      Conjunct cj;
      cj.ref_id = jc.at("ref").get<std::string>();
      cj.region = region_from_json(jc.at("region"));
      cj.negate = jc.value("negate", false);
      i.rule.conjuncts.push_back(std::move(cj));
    }
    i.validity_lifetime_ms = ji.at("validity_lifetime_ms").get<DurationMs>();
    i.decay_lambda_per_ms = ji.contains("decay_lambda_per_ms")
                                ? ji.at("decay_lambda_per_ms").get<double>()
                                : default_lambda(i.validity_lifetime_ms);
    c.add_item(std::move(i));
  }
  if (j.contains("utility")) {
    for (auto it = j.at("utility").begin(); it != j.at("utility").end(); ++it) {
      const json& ju = it.value();
      eval::FactorArray u{};
      u[eval::kFactorPoa] = 0.0;
      u[eval::kFactorQos] = ju.at("qos").get<double>();
      u[eval::kFactorCoc] = ju.at("coc").get<double>();
      u[eval::kFactorQoc] = ju.at("qoc").get<double>();
      u[eval::kFactorSla] = ju.at("sla").get<double>();
      u[eval::kFactorTimeliness] = ju.at("timeliness").get<double>();
      u[eval::kFactorProviderType] = ju.at("provider_type").get<double>();
      c.set_utility(it.key(), u);
    }
  }
  c.finalize();
  return c;
}

Corpus Corpus::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("corpus file is not valid JSON: " + std::string(e.what()));
  }
  return from_json(j);
}

void Corpus::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write corpus file: " + path);
  out << to_json().dump(2) << '\n';
}

}  // namespace ctxcache::context
