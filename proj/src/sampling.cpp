#include "evade/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evade {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double poly_eval(double v, double a, double j, double t) {
  return ((j / 6.0 * t + 0.5 * a) * t + v) * t;
}

// Guarded Newton polish on f(t) = displacement(t) - dp.
double polish(double v, double a, double j, double dp, double t) {
  for (int i = 0; i < 24; ++i) {
    const double f = poly_eval(v, a, j, t) - dp;
    const double df = 0.5 * j * t * t + a * t + v;
    if (std::abs(df) < 1e-300) {
      break;
    }
    const double step = f / df;
    t -= step;
    if (std::abs(step) < 1e-15 * (std::abs(t) + 1e-15)) {
      break;
    }
  }
  return t;
}

void real_cubic_roots(double c3, double c2, double c1, double c0,
                      double out[3], int& n) {
  n = 0;
  // Depressed form: t = s - b/3 with monic coefficients.
  const double b = c2 / c3;
  const double c = c1 / c3;
  const double d = c0 / c3;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  const double shift = -b / 3.0;
  if (disc > 0.0) {
    const double r = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + r);
    const double w = std::cbrt(-q / 2.0 - r);
    out[n++] = u + w + shift;
  } else if (p == 0.0 && q == 0.0) {
    out[n++] = shift;
  } else {
    const double rho = std::sqrt(-p * p * p / 27.0);
    const double theta = std::acos(std::clamp(-q / (2.0 * rho), -1.0, 1.0));
    const double m = 2.0 * std::sqrt(-p / 3.0);
    for (int k = 0; k < 3; ++k) {
      out[n++] = m * std::cos((theta + 2.0 * M_PI * k) / 3.0) + shift;
    }
  }
}

}  // namespace

double first_displacement_time(double v, double a, double j, double dp) {
  double cands[8];
  int n = 0;
  if (std::abs(j) > 1e-30) {
    real_cubic_roots(j / 6.0, 0.5 * a, v, -dp, cands, n);
  }
  if (std::abs(a) > 1e-30) {
    const double disc = v * v + 2.0 * a * dp;
    if (disc >= 0.0) {
      const double r = std::sqrt(disc);
      cands[n++] = (-v + r) / a;
      cands[n++] = (-v - r) / a;
    }
  }
  if (std::abs(v) > 1e-30) {
    cands[n++] = dp / v;
  }
  double best = kInf;
  const double ftol = 1e-9 * std::max(std::abs(dp), 1.0);
  for (int i = 0; i < n; ++i) {
    double t = polish(v, a, j, dp, cands[i]);
    if (t > 1e-13 && t < best &&
        std::abs(poly_eval(v, a, j, t) - dp) < ftol) {
      best = t;
    }
  }
  return best;
}

std::vector<TrajectorySample> sample_constant_distance(const Trajectory& traj,
                                                       const Vec3& dp) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(dp[i] > 0.0)) {
      throw std::invalid_argument("sample_constant_distance: dp must be > 0");
    }
  }
  std::vector<double> borders;
  for (const AxisProfile& axis : traj.axes) {
    double acc = 0.0;
    for (const Segment& seg : axis.segments) {
      acc += seg.duration;
      borders.push_back(std::min(acc, traj.duration));
    }
  }
  borders.push_back(traj.duration);
  std::sort(borders.begin(), borders.end());

  // Local (state, jerk) of the segment containing t, for one axis.
  auto local = [&](std::size_t axis, double t, double& jerk) -> AxisState {
    const AxisProfile& prof = traj.axes[axis];
    if (prof.segments.empty()) {
      jerk = 0.0;
      return AxisState{};
    }
    double acc = 0.0;
    for (const Segment& seg : prof.segments) {
      if (t < acc + seg.duration - 1e-12 || &seg == &prof.segments.back()) {
        jerk = seg.jerk;
        const double tl = std::clamp(t - acc, 0.0, seg.duration);
        return advance(seg.start, jerk, tl);
      }
      acc += seg.duration;
    }
    jerk = 0.0;
    return prof.end_state();
  };

  std::vector<TrajectorySample> out;
  double t = 0.0;
  out.push_back({0.0, traj.eval(0.0)});
  std::size_t bi = 0;
  while (t < traj.duration - 1e-12) {
    while (bi < borders.size() && borders[bi] <= t + 1e-12) {
      ++bi;
    }
    const double border = bi < borders.size() ? borders[bi] : traj.duration;
    double step = kInf;
    for (std::size_t axis = 0; axis < 3; ++axis) {
      double jerk = 0.0;
      const AxisState s = local(axis, t, jerk);
      step = std::min(step, first_displacement_time(s.v, s.a, jerk, dp[axis]));
      step = std::min(step, first_displacement_time(s.v, s.a, jerk, -dp[axis]));
    }
    double t_next = std::min(t + step, border);
    t_next = std::min(t_next, traj.duration);
    if (t_next <= t + 1e-12) {
      t_next = std::min(border, traj.duration);  // degenerate all-zero segment
    }
    out.push_back({t_next, traj.eval(t_next)});
    t = t_next;
  }
  if (out.back().t < traj.duration - 1e-12) {
    out.push_back({traj.duration, traj.eval(traj.duration)});
  }
  return out;
}

std::vector<TrajectorySample> sample_constant_time(const Trajectory& traj,
                                                   double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("sample_constant_time: dt must be > 0");
  }
  std::vector<TrajectorySample> out;
  for (double t = 0.0; t < traj.duration; t += dt) {
    out.push_back({t, traj.eval(t)});
  }
  out.push_back({traj.duration, traj.eval(traj.duration)});
  return out;
}

}  // namespace evade
