#include "dualarm/distance_meter.hpp"

#include "dualarm/timing.hpp"

namespace dualarm {

DistanceMeter& DistanceMeter::local() {
  thread_local DistanceMeter meter;
  return meter;
}

DistanceMeter::Scope::Scope() {
  DistanceMeter& m = local();
  outermost_ = (m.depth_++ == 0);
  if (outermost_) start_ = thread_cpu_seconds();
}

DistanceMeter::Scope::~Scope() {
  DistanceMeter& m = local();
  --m.depth_;
  if (outermost_) {
    m.totals_.calls += 1;
    m.totals_.seconds += thread_cpu_seconds() - start_;
  }
}

}  // namespace dualarm
