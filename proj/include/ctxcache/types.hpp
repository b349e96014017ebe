#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ctxcache {

// Simulated wall clock. All simulation timestamps and durations are integer
// milliseconds; simulated time is fully decoupled from host wall time.
using TimeMs = std::int64_t;
using DurationMs = std::int64_t;

// Base class for library errors so callers can catch everything from this
// library in one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value was tested against a region predicate of a different kind
// (e.g. a numeric interval applied to a boolean attribute).
class KindMismatchError : public Error {
 public:
  using Error::Error;
};

// A rule referenced an attribute or item id that is not in the corpus.
class MissingAttributeError : public Error {
 public:
  explicit MissingAttributeError(const std::string& id)
      : Error("unknown attribute or item id: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// Item-to-item references in the corpus form a cycle.
class CycleError : public Error {
 public:
  using Error::Error;
};

// Malformed corpus/trace/config input.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Result of a cache lookup. A lookup of a cached-but-stale entry is served
// only after an implicit refresh and is counted separately from a fresh hit;
// the three outcomes partition all queries.
enum class LookupOutcome { kHit, kExpiredHit, kMiss };

inline const char* to_string(LookupOutcome o) {
  switch (o) {
    case LookupOutcome::kHit: return "hit";
    case LookupOutcome::kExpiredHit: return "expired_hit";
    case LookupOutcome::kMiss: return "miss";
  }
  return "?";
}

}  // namespace ctxcache
