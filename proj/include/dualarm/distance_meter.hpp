#pragma once

#include <cstdint>

namespace dualarm {

/// Counts distance queries and the CPU time spent in them.
///
/// One meter per thread; workers read their own meter when they finish and the
/// joining thread merges the snapshots. Only the outermost query on a thread is
/// counted, so a clearance query that evaluates many primitive pairs is one call.
class DistanceMeter {
 public:
  struct Snapshot {
    std::uint64_t calls{0};
    double seconds{0.0};

    Snapshot& operator+=(const Snapshot& other) {
      calls += other.calls;
      seconds += other.seconds;
      return *this;
    }
  };

  /// The calling thread's meter.
  static DistanceMeter& local();

  void reset() { totals_ = {}; }
  Snapshot snapshot() const { return totals_; }
  void merge(const Snapshot& other) { totals_ += other; }

  /// RAII guard placed at the top of every metered distance routine.
  class Scope {
   public:
    Scope();
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    double start_{0.0};
    bool outermost_{false};
  };

 private:
  Snapshot totals_;
  int depth_{0};
};

}  // namespace dualarm
