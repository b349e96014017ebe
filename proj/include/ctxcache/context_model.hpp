#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ctxcache/evaluation.hpp"
#include "ctxcache/types.hpp"

namespace ctxcache::context {

// ---- Attribute values ------------------------------------------------------

struct Coordinate {
  double latitude = 0.0;   // [-90, 90]
  double longitude = 0.0;  // [-180, 180]
};

// Wrapper so a timestamp-valued attribute is a distinct variant alternative
// from a plain number.
struct TimeValue {
  TimeMs ms = 0;  // non-negative
};

enum class ValueKind { kBoolean, kNumber, kCoordinate, kTimestamp };

const char* to_string(ValueKind k);
ValueKind kind_from_string(std::string_view s);

using AttributeValue = std::variant<bool, double, Coordinate, TimeValue>;

ValueKind kind_of(const AttributeValue& v);
void validate_value(const AttributeValue& v);  // throws ValidationError

// ---- Region predicates -----------------------------------------------------

struct BoolEquals {
  bool value = true;
};

// Numeric interval with independently open/closed (and optionally infinite)
// ends. Applies to number- and timestamp-valued attributes.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = true;
  bool hi_closed = true;
};

struct BoundingBox {
  double lat_lo = -90.0, lat_hi = 90.0;
  double lon_lo = -180.0, lon_hi = 180.0;
};

using Region = std::variant<BoolEquals, Interval, BoundingBox>;

// True iff the value lies in the region. The value kind must match the
// region kind (intervals accept numbers and timestamps); a mismatch throws
// KindMismatchError.
bool evaluate_region(const AttributeValue& value, const Region& region);

// ---- Attributes ------------------------------------------------------------

struct AttributeDef {
  std::string id;
  ValueKind kind = ValueKind::kBoolean;
  std::string unit;  // free-form, informational
  std::optional<Region> acceptable_region;
};

struct ContextAttribute {
  AttributeDef def;
  AttributeValue value = false;
  TimeMs last_update = 0;
  double decay_lambda_per_ms = 0.0;       // >= 0
  DurationMs validity_lifetime_ms = 1;    // > 0
};

// ---- Items and inference rules ---------------------------------------------

// One conjunct of a rule: the referenced id may be an attribute or another
// item (hierarchical rules). `negate` flips the conjunct.
struct Conjunct {
  std::string ref_id;
  Region region;
  bool negate = false;
};

// Rule output when the conjunction holds: plain boolean or a categorical
// label. When the rule does not fire the derived value is boolean false.
using RuleOutput = std::variant<bool, std::string>;

struct InferenceRule {
  std::vector<Conjunct> conjuncts;  // non-empty; pure conjunction
  RuleOutput output = true;
};

struct ContextItem {
  std::string id;
  std::vector<std::string> attribute_ids;  // rule dependencies (attributes and/or items)
  InferenceRule rule;
  double decay_lambda_per_ms = 0.0;
  DurationMs validity_lifetime_ms = 1;

  // Inference state. derived_value is present iff inference ran since the
  // newest update of any transitive input.
  bool fired = false;
  std::optional<RuleOutput> derived_value;
  TimeMs last_inferred = 0;
};

struct InferenceResult {
  RuleOutput value;
  bool fired = false;
  // Every attribute consulted, transitively through item references; sorted.
  std::vector<std::string> inputs_used;
};

// ---- Corpus ----------------------------------------------------------------

// A cacheable unit (item or attribute) as seen by the caching layers:
// freshness parameters, static utility scores, and the transitive attribute
// inputs that feed demand accounting.
struct Target {
  std::string id;
  bool is_item = false;
  DurationMs validity_lifetime_ms = 1;
  double decay_lambda_per_ms = 0.0;
  std::vector<std::uint32_t> input_attr_targets;  // indices into targets(), items only
  eval::FactorArray static_utility{};             // PoA slot unused (filled live)
};

class Corpus {
 public:
  Corpus() = default;

  static Corpus from_json(const nlohmann::json& j);
  static Corpus load_file(const std::string& path);
  nlohmann::json to_json() const;
  void save_file(const std::string& path) const;

  // Construction API used by the generator; finalize() validates, resolves
  // the topological order and the transitive input sets, and builds the
  // flattened target table.
  void add_attribute(ContextAttribute a);
  void add_item(ContextItem i);
  void set_utility(const std::string& target_id, const eval::FactorArray& u);
  void finalize();

  const std::map<std::string, ContextAttribute>& attributes() const { return attributes_; }
  const std::map<std::string, ContextItem>& items() const { return items_; }
  const std::vector<std::string>& topological_items() const { return topo_items_; }

  // Re-evaluates one item's rule (dependencies first) and stamps
  // last_inferred. Throws MissingAttributeError if a reference is unknown.
  InferenceResult infer_item(const std::string& item_id, TimeMs now);
  void infer_all(TimeMs now);

  // Updates an attribute value and invalidates the derived values of all
  // transitively dependent items.
  void set_attribute_value(const std::string& attr_id, AttributeValue v, TimeMs now);

  const std::vector<Target>& targets() const { return targets_; }
  // Index into targets() for an id, or npos.
  static constexpr std::uint32_t kNoTarget = 0xffffffffu;
  std::uint32_t target_index(std::string_view id) const;
  const Target* find_target(std::string_view id) const;

  // Number of items whose transitive inputs include this attribute; used to
  // account inferred demand incrementally.
  std::uint32_t dependant_item_count(std::uint32_t attr_target_index) const;

  // Overrides for experiments: `infinite` disables staleness entirely
  // (lifetime ~ forever, decay 0).
  void override_lifetimes(DurationMs lifetime_ms, double lambda_per_ms);
  void make_lifetimes_infinite();

 private:
  std::map<std::string, ContextAttribute> attributes_;
  std::map<std::string, ContextItem> items_;
  std::map<std::string, eval::FactorArray> utility_;
  std::vector<std::string> topo_items_;
  std::map<std::string, std::vector<std::string>> transitive_inputs_;
  std::vector<Target> targets_;
  std::map<std::string, std::uint32_t, std::less<>> target_index_;
  std::vector<std::uint32_t> dependant_items_;
  bool finalized_ = false;

  void require_finalized() const;
  void invalidate_dependents(const std::string& id);
};

// JSON (de)serialization helpers shared with config parsing.
nlohmann::json region_to_json(const Region& r);
Region region_from_json(const nlohmann::json& j);

}  // namespace ctxcache::context
