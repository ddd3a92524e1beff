#pragma once

#include <ctime>

namespace dualarm {

/// CPU time consumed by the calling thread [s]. Stage timings use this clock so
/// workers running concurrently on a shared core do not inflate each other.
inline double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

class StageTimer {
 public:
  StageTimer() : start_(thread_cpu_seconds()) {}
  double elapsed() const { return thread_cpu_seconds() - start_; }
  void restart() { start_ = thread_cpu_seconds(); }

 private:
  double start_;
};

}  // namespace dualarm
