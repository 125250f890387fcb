#include "evade/trajectory.hpp"

#include <algorithm>
#include <stdexcept>

namespace evade {

namespace {
constexpr double kTimeTol = 1e-9;
}

AxisState AxisProfile::state_at(double t) const {
  if (t < -kTimeTol || t > duration + kTimeTol) {
    throw std::out_of_range("AxisProfile::state_at: t outside [0, duration]");
  }
  t = std::clamp(t, 0.0, duration);
  if (segments.empty()) {
    return AxisState{};
  }
  double t0 = 0.0;
  for (const Segment& seg : segments) {
    if (t <= t0 + seg.duration || &seg == &segments.back()) {
      return advance(seg.start, seg.jerk, std::min(t - t0, seg.duration));
    }
    t0 += seg.duration;
  }
  return end_state();
}

AxisState AxisProfile::end_state() const {
  if (segments.empty()) {
    return AxisState{};
  }
  const Segment& last = segments.back();
  return advance(last.start, last.jerk, last.duration);
}

State3 Trajectory::eval(double t) const {
  if (t < -kTimeTol || t > duration + kTimeTol) {
    throw std::out_of_range("Trajectory::eval: t outside [0, T]");
  }
  t = std::clamp(t, 0.0, duration);
  State3 out;
  for (std::size_t i = 0; i < 3; ++i) {
    // Per-axis totals can differ from T by solver tolerance; clamp per axis.
    out.axis(i) = axes[i].state_at(std::min(t, axes[i].duration));
  }
  out.timestamp = start.timestamp + t;
  return out;
}

Trajectory Trajectory::tail(double t0) const {
  if (t0 < -kTimeTol || t0 > duration + kTimeTol) {
    throw std::out_of_range("Trajectory::tail: t0 outside [0, T]");
  }
  t0 = std::clamp(t0, 0.0, duration);
  Trajectory out;
  out.duration = duration - t0;
  out.start = eval(t0);
  out.target = target;
  for (std::size_t i = 0; i < 3; ++i) {
    const AxisProfile& src = axes[i];
    AxisProfile& dst = out.axes[i];
    const double tcut = std::min(t0, src.duration);
    dst.duration = src.duration - tcut;
    double acc = 0.0;
    for (const Segment& seg : src.segments) {
      const double seg_end = acc + seg.duration;
      if (seg_end > tcut + kTimeTol) {
        Segment s = seg;
        if (acc < tcut) {
          const double local = tcut - acc;
          s.start = advance(seg.start, seg.jerk, local);
          s.duration = seg.duration - local;
        }
        dst.segments.push_back(s);
      }
      acc = seg_end;
    }
    if (dst.segments.empty()) {
      Segment s;
      s.duration = dst.duration;
      s.start = src.end_state();
      dst.segments.push_back(s);
    }
  }
  return out;
}

}  // namespace evade
