#include "chronosim/event_queue.hpp"

#include <stdexcept>
#include <utility>

namespace chronosim {

std::optional<SimTime> EventQueue::next_time() const {
  if (heap_.empty()) return std::nullopt;
  return heap_.top().at;
}

void EventQueue::schedule(SimTime at, Handler handler) {
  if (at < now_) throw PreconditionError("event scheduled in the past");
  heap_.push(Entry{at, next_seq_++, std::move(handler)});
}

bool EventQueue::step() {
  if (heap_.empty()) return false;
  // priority_queue::top is const; the handler is moved out before pop.
  Entry e = std::move(const_cast<Entry&>(heap_.top()));
  heap_.pop();
  if (e.at < now_) throw std::logic_error("event queue went back in time");
  now_ = e.at;
  e.handler(e.at);
  return true;
}

void EventQueue::run_until(SimTime horizon) {
  while (!heap_.empty() && heap_.top().at <= horizon) step();
  if (now_ < horizon) now_ = horizon;
}

}  // namespace chronosim
