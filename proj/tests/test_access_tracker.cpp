#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "ctxcache/access_tracker.hpp"
#include "ctxcache/context_model.hpp"
#include "ctxcache/types.hpp"

using namespace ctxcache;
using context::BoolEquals;
using context::Conjunct;
using context::ContextAttribute;
using context::ContextItem;
using context::Corpus;
using context::Interval;
using eval::AccessStats;
using eval::AccessTracker;

namespace {

ContextAttribute num_attr(std::string id) {
  ContextAttribute a;
  a.def.id = std::move(id);
  a.def.kind = context::ValueKind::kNumber;
  a.value = 0.0;
  a.validity_lifetime_ms = 60'000;
  return a;
}

ContextItem item_over(std::string id, std::vector<std::string> deps) {
  ContextItem i;
  i.id = std::move(id);
  for (const std::string& d : deps) {
    i.rule.conjuncts.push_back({d, Interval{}, false});
  }
  i.attribute_ids = std::move(deps);
  i.rule.output = true;
  i.validity_lifetime_ms = 60'000;
  return i;
}

// a1 feeds both items, a2 feeds i1 only, b feeds nothing.
Corpus demo_corpus() {
  Corpus c;
  c.add_attribute(num_attr("a1"));
  c.add_attribute(num_attr("a2"));
  c.add_attribute(num_attr("b"));
  c.add_item(item_over("i1", {"a1", "a2"}));
  c.add_item(item_over("i2", {"a1"}));
  c.finalize();
  return c;
}

}  // namespace

TEST_CASE("construction validates the window") {
  Corpus c = demo_corpus();
  CHECK_THROWS_AS(AccessTracker(c, 0), ValidationError);
  CHECK_THROWS_AS(AccessTracker(c, -5), ValidationError);
  CHECK_NOTHROW(AccessTracker(c, 1));
}

TEST_CASE("demand aggregates direct and inferred queries") {
  Corpus c = demo_corpus();
  AccessTracker t(c, 30 * 60 * 1000);

  for (TimeMs ts : {1000, 2000, 3000}) t.record("i1", ts);
  t.record("a1", 4000);
  t.record("a1", 5000);
  t.record("a2", 6000);

  // 3 direct + (2, 1) over the two inputs.
  CHECK(t.total_queries("i1") == 6);
  // No direct demand, inflow from a1 only.
  CHECK(t.total_queries("i2") == 2);
  CHECK(t.total_queries("b") == 0);
  CHECK(t.total_queries("a1") == 2);  // attributes count direct queries only
  CHECK(t.direct_count("i1") == 3);
  CHECK(t.direct_count("a1") == 2);

  CHECK(t.events_recorded() == 6);
  // Each attribute query is also one unit of demand per dependent item:
  // 3 (i1) + 2*(1+2) (a1 feeds i1, i2) + 1*(1+1) (a2 feeds i1) = 11.
  CHECK(t.total_historical() == 11);

  AccessStats s = t.stats_for("i1", 6000);
  CHECK(s.historical == 6);
  CHECK(s.recent == 6);  // everything is inside the wide window
  CHECK(s.window_total == 6);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("five direct plus five inferred is ten") {
  Corpus c = demo_corpus();
  AccessTracker t(c, 60'000);
  for (TimeMs ts = 0; ts < 5000; ts += 1000) t.record("i2", ts);
  for (TimeMs ts = 5000; ts < 10000; ts += 1000) t.record("a1", ts);
  CHECK(t.total_queries("i2") == 10);
}

TEST_CASE("sliding window prunes old events but keeps history") {
  Corpus c = demo_corpus();
  AccessTracker t(c, 1000);
  t.record("a1", 0);
  t.record("a1", 500);
  t.record("b", 700);
  t.record("a1", 1500);

  AccessStats s = t.stats_for("a1", 1500);
  CHECK(s.historical == 3);
  CHECK(s.recent == 2);        // the t=0 event fell off; t=500 sits on the edge
  CHECK(s.window_total == 3);  // 500, 700, 1500 across all targets

  s = t.stats_for("a1", 2600);
  CHECK(s.historical == 3);  // history never decays
  CHECK(s.recent == 0);
  CHECK(s.window_total == 0);
}

TEST_CASE("item stats inherit their attributes' recent windows") {
  Corpus c = demo_corpus();
  AccessTracker t(c, 1000);
  t.record("a2", 0);
  t.record("i1", 2000);
  AccessStats s = t.stats_for("i1", 2000);
  CHECK(s.historical == 2);  // one direct, one inflow
  CHECK(s.recent == 1);      // the a2 query aged out of the window
  CHECK(s.window_total == 1);
}

TEST_CASE("seen targets accumulate as ascending unique indices") {
  Corpus c = demo_corpus();
  AccessTracker t(c, 60'000);
  CHECK(t.seen_targets().empty());
  t.record("i1", 10);
  t.record("a1", 20);
  t.record("a1", 30);
  t.record("a2", 40);

  std::vector<std::uint32_t> expect{c.target_index("a1"), c.target_index("a2"),
                                    c.target_index("i1")};
  std::sort(expect.begin(), expect.end());
  CHECK(t.seen_targets() == expect);
}

TEST_CASE("record rejects unknown ids and time travel") {
  Corpus c = demo_corpus();
  AccessTracker t(c, 60'000);
  CHECK_THROWS_AS(t.record("ghost", 10), MissingAttributeError);
  t.record("a1", 100);
  CHECK_THROWS_AS(t.record("a1", 99), ValidationError);
  CHECK_NOTHROW(t.record("a1", 100));  // equal timestamps are legal
  CHECK_THROWS_AS(t.stats_for("ghost", 10), MissingAttributeError);
  CHECK_THROWS_AS(t.total_queries("ghost"), MissingAttributeError);
}

TEST_CASE("stats_for by index and by id agree") {
  Corpus c = demo_corpus();
  AccessTracker t(c, 60'000);
  t.record("i1", 10);
  t.record("a1", 20);
  AccessStats by_id = t.stats_for("i1", 20);
  AccessStats by_ix = t.stats_for(c.target_index("i1"), 20);
  CHECK(by_id.historical == by_ix.historical);
  CHECK(by_id.recent == by_ix.recent);
  CHECK(by_id.window_total == by_ix.window_total);
}
