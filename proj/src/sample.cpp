#include "recur/sample.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>

#include "recur/errors.hpp"
#include "recur/rng.hpp"

namespace recur {

namespace {

std::string fmt_time(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

// One entry of the pooled time multiset: kind 0 = follow-up time,
// kind 1 = recurrent event time.
struct PooledTime {
  double value;
  int kind;
  std::size_t subject;
  std::size_t event_index;
};

void check_subject(const Subject& s, std::size_t d, std::size_t idx) {
  if (s.Z.size() != d) {
    throw DimensionMismatch("subject " + std::to_string(idx) + ": covariate dimension " +
                            std::to_string(s.Z.size()) + " != " + std::to_string(d));
  }
  for (double z : s.Z) {
    if (!std::isfinite(z)) {
      throw SchemaError("subject " + std::to_string(idx) + ": non-finite covariate");
    }
  }
  if (!std::isfinite(s.T) || s.T < 0.0) {
    throw NegativeTime("subject " + std::to_string(idx) + ": follow-up time " + fmt_time(s.T));
  }
  for (double e : s.events) {
    if (!std::isfinite(e) || e <= 0.0) {
      throw NegativeTime("subject " + std::to_string(idx) + ": event time " + fmt_time(e));
    }
    if (e > s.T) {
      throw EventAfterObservation("subject " + std::to_string(idx) + ": event time " +
                                  fmt_time(e) + " exceeds follow-up time " + fmt_time(s.T));
    }
  }
}

std::vector<PooledTime> pool_times(const Sample& s) {
  std::vector<PooledTime> pooled;
  for (std::size_t i = 0; i < s.subjects.size(); ++i) {
    pooled.push_back({s.subjects[i].T, 0, i, 0});
    for (std::size_t k = 0; k < s.subjects[i].events.size(); ++k) {
      pooled.push_back({s.subjects[i].events[k], 1, i, k});
    }
  }
  std::sort(pooled.begin(), pooled.end(),
            [](const PooledTime& a, const PooledTime& b) { return a.value < b.value; });
  return pooled;
}

}  // namespace

std::size_t Sample::d() const {
  if (subjects.empty()) throw EmptySample("sample has no subjects");
  return subjects.front().Z.size();
}

double Sample::t_max() const {
  if (subjects.empty()) throw EmptySample("sample has no subjects");
  double m = subjects.front().T;
  for (const Subject& s : subjects) m = std::max(m, s.T);
  return m;
}

Sample validate_sample(const Sample& raw, const ValidationOptions& opts) {
  if (raw.subjects.empty()) throw EmptySample("sample has no subjects");
  const std::size_t d = raw.subjects.front().Z.size();
  if (d < 1) throw DimensionMismatch("covariate dimension must be at least 1");

  Sample out = raw;
  for (std::size_t i = 0; i < out.subjects.size(); ++i) {
    std::sort(out.subjects[i].events.begin(), out.subjects[i].events.end());
    check_subject(out.subjects[i], d, i);
  }

  // Ties anywhere in the pooled follow-up/event times break the product-limit
  // and kernel formulas, so they are rejected outright unless the caller opted
  // into the deterministic jitter.
  const double eps = 1e-9 * out.t_max();
  RngStream jitter_rng(stream_key(opts.seed, 0x6a697474u, 0));
  for (int round = 0;; ++round) {
    std::vector<PooledTime> pooled = pool_times(out);
    std::vector<PooledTime> colliding;
    for (std::size_t k = 1; k < pooled.size(); ++k) {
      if (pooled[k].value == pooled[k - 1].value) colliding.push_back(pooled[k]);
    }
    if (colliding.empty()) break;
    if (!opts.jitter || eps <= 0.0 || round >= 32) {
      throw TieViolation("tied times in sample near t=" + fmt_time(colliding.front().value) +
                         " (" + std::to_string(colliding.size()) + " collisions)");
    }
    // Later occupant of each tied value moves: follow-up times up, event
    // times down, keeping 0 < event <= T intact.
    for (const PooledTime& c : colliding) {
      Subject& s = out.subjects[c.subject];
      const double step = eps * jitter_rng.uniform_pos();
      if (c.kind == 0) {
        s.T += step;
      } else {
        double moved = s.events[c.event_index] - step;
        if (moved <= 0.0) moved = s.events[c.event_index] + step;
        if (moved > s.T) moved = s.events[c.event_index] - 0.5 * step;
        if (moved <= 0.0 || moved > s.T) {
          throw TieViolation("cannot separate tied event time " +
                             fmt_time(s.events[c.event_index]));
        }
        s.events[c.event_index] = moved;
      }
    }
    for (std::size_t i = 0; i < out.subjects.size(); ++i) {
      std::sort(out.subjects[i].events.begin(), out.subjects[i].events.end());
    }
  }

  std::stable_sort(out.subjects.begin(), out.subjects.end(),
                   [](const Subject& a, const Subject& b) { return a.T < b.T; });
  return out;
}

}  // namespace recur
