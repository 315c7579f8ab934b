// Deterministic discrete-event queue. Events at equal times run in the order
// they were scheduled.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "chronosim/timebase.hpp"

namespace chronosim {

class EventQueue {
 public:
  using Handler = std::function<void(SimTime)>;

  SimTime now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  size_t size() const { return heap_.size(); }
  std::optional<SimTime> next_time() const;

  /// PreconditionError if `at` is earlier than now().
  void schedule(SimTime at, Handler handler);

  /// Pops and runs the earliest event. Returns false when empty.
  bool step();

  /// Runs every event scheduled at or before `horizon`, then sets now() to
  /// `horizon`. Events past the horizon stay queued.
  void run_until(SimTime horizon);

 private:
  struct Entry {
    SimTime at;
    uint64_t seq;
    Handler handler;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  SimTime now_;
  uint64_t next_seq_ = 0;
};

}  // namespace chronosim
