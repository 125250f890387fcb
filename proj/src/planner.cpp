#include "evade/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace evade {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroSeg = 1e-12;

// One jerk-limited acceleration transition: ramp a0 -> a_pk, optional hold,
// ramp a_pk -> a1. Produces the exact velocity change dv_need.
struct Transition {
  double t1 = 0.0, j1 = 0.0;  // ramp to a_pk
  double th = 0.0;            // hold at a_pk
  double t2 = 0.0, j2 = 0.0;  // ramp to a1
  double a_pk = 0.0;

  double duration() const { return t1 + th + t2; }
};

double ramp_dv(double a_from, double a_to, double j) {
  return (a_to * a_to - a_from * a_from) / (2.0 * j);
}

Transition solve_transition(double v0, double a0, double v1, double a1,
                            const AxisConstraints& c) {
  Transition tr;
  const double dv_need = v1 - v0;
  const double jd = (a1 >= a0) ? c.j_max : c.j_min;
  const double dv_direct = ramp_dv(a0, a1, jd);

  auto hump_dv = [&](double a_pk, double ja, double jb) {
    return ramp_dv(a0, a_pk, ja) + ramp_dv(a_pk, a1, jb);
  };

  if (dv_need > dv_direct) {
    // Peak above both boundary accelerations.
    const double k = 1.0 / (2.0 * c.j_max) - 1.0 / (2.0 * c.j_min);
    const double rhs =
        dv_need + a0 * a0 / (2.0 * c.j_max) - a1 * a1 / (2.0 * c.j_min);
    double a_pk = std::sqrt(std::max(0.0, rhs / k));
    a_pk = std::max(a_pk, std::max(a0, a1));
    if (a_pk > c.a_max) {
      tr.a_pk = c.a_max;
      tr.th = (dv_need - hump_dv(c.a_max, c.j_max, c.j_min)) / c.a_max;
    } else {
      tr.a_pk = a_pk;
    }
    tr.j1 = c.j_max;
    tr.j2 = c.j_min;
  } else if (dv_need < dv_direct) {
    const double k = 1.0 / (2.0 * c.j_min) - 1.0 / (2.0 * c.j_max);
    const double rhs =
        dv_need + a0 * a0 / (2.0 * c.j_min) - a1 * a1 / (2.0 * c.j_max);
    double a_pk = -std::sqrt(std::max(0.0, rhs / k));
    a_pk = std::min(a_pk, std::min(a0, a1));
    if (a_pk < c.a_min) {
      tr.a_pk = c.a_min;
      tr.th = (dv_need - hump_dv(c.a_min, c.j_min, c.j_max)) / c.a_min;
    } else {
      tr.a_pk = a_pk;
    }
    tr.j1 = c.j_min;
    tr.j2 = c.j_max;
  } else {
    tr.a_pk = a1;
    tr.j1 = jd;
    tr.j2 = jd;
  }
  tr.th = std::max(tr.th, 0.0);
  tr.t1 = (tr.j1 != 0.0) ? (tr.a_pk - a0) / tr.j1 : 0.0;
  tr.t2 = (tr.j2 != 0.0) ? (a1 - tr.a_pk) / tr.j2 : 0.0;
  tr.t1 = std::max(tr.t1, 0.0);
  tr.t2 = std::max(tr.t2, 0.0);
  return tr;
}

void append_phase(std::vector<Segment>& segs, AxisState& s, double jerk,
                  double t) {
  if (t <= kZeroSeg) {
    return;
  }
  Segment seg;
  seg.duration = t;
  seg.jerk = jerk;
  seg.start = s;
  segs.push_back(seg);
  s = advance(s, jerk, t);
}

void append_transition(std::vector<Segment>& segs, AxisState& s,
                       const Transition& tr) {
  append_phase(segs, s, tr.j1, tr.t1);
  append_phase(segs, s, 0.0, tr.th);
  append_phase(segs, s, tr.j2, tr.t2);
}

// Displacement and structural duration of accel(v0,a0 -> v,0) + decel
// (v,0 -> vf,af), cruise excluded.
struct Shape {
  Transition acc, dec;
  double disp = 0.0;
  double duration = 0.0;
};

Shape shape_at(double v_peak, const AxisState& s0, const AxisState& s1,
               const AxisConstraints& c) {
  Shape sh;
  sh.acc = solve_transition(s0.v, s0.a, v_peak, 0.0, c);
  sh.dec = solve_transition(v_peak, 0.0, s1.v, s1.a, c);
  AxisState s{0.0, s0.v, s0.a};
  s = advance(s, sh.acc.j1, sh.acc.t1);
  s = advance(s, 0.0, sh.acc.th);
  s = advance(s, sh.acc.j2, sh.acc.t2);
  s = advance(s, sh.dec.j1, sh.dec.t1);
  s = advance(s, 0.0, sh.dec.th);
  s = advance(s, sh.dec.j2, sh.dec.t2);
  sh.disp = s.p;
  sh.duration = sh.acc.duration() + sh.dec.duration();
  return sh;
}

struct Candidate {
  double v_peak = 0.0;
  double cruise = 0.0;
  double duration = kInf;
};

bool phase_ok(const AxisState& s, double j, double t, const AxisConstraints& c) {
  constexpr double tol = 1e-9;
  const AxisState e = advance(s, j, t);
  if (s.a < c.a_min - tol || s.a > c.a_max + tol || e.a < c.a_min - tol ||
      e.a > c.a_max + tol) {
    return false;
  }
  auto v_ok = [&](double v) { return v >= c.v_min - tol && v <= c.v_max + tol; };
  if (!v_ok(s.v) || !v_ok(e.v)) {
    return false;
  }
  if (j != 0.0) {
    const double ts = -s.a / j;  // interior velocity extremum
    if (ts > 0.0 && ts < t && !v_ok(advance(s, j, ts).v)) {
      return false;
    }
  }
  return true;
}

// Whether the cruise-free part of the profile stays inside the velocity and
// acceleration bounds (candidates connecting awkward boundary states can
// swing outside; those must be discarded, not returned).
bool shape_ok(const Shape& sh, const AxisState& s0, const AxisConstraints& c) {
  const double js[6] = {sh.acc.j1, 0.0, sh.acc.j2, sh.dec.j1, 0.0, sh.dec.j2};
  const double ts[6] = {sh.acc.t1, sh.acc.th, sh.acc.t2,
                        sh.dec.t1, sh.dec.th, sh.dec.t2};
  AxisState s{0.0, s0.v, s0.a};
  for (int i = 0; i < 6; ++i) {
    if (!phase_ok(s, js[i], ts[i], c)) {
      return false;
    }
    s = advance(s, js[i], ts[i]);
  }
  return true;
}

// All locally optimal (v_peak, cruise) pairs matching displacement D:
// zero-cruise roots of disp(v) = D plus the two saturated-cruise profiles.
std::vector<Candidate> displacement_candidates(const AxisState& s0,
                                               const AxisState& s1,
                                               const AxisConstraints& c) {
  const double dist = s1.p - s0.p;
  auto g = [&](double v) { return shape_at(v, s0, s1, c).disp - dist; };

  constexpr int kGrid = 64;
  std::vector<Candidate> out;
  double prev_v = c.v_min;
  double prev_g = g(prev_v);

  auto add_root = [&](double lo, double hi, double glo) {
    for (int i = 0; i < 90 && hi - lo > 1e-15; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if ((gm < 0.0) == (glo < 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    const double v = 0.5 * (lo + hi);
    const Shape sh = shape_at(v, s0, s1, c);
    if (!shape_ok(sh, s0, c)) {
      return;
    }
    Candidate cand;
    cand.v_peak = v;
    cand.cruise = 0.0;
    cand.duration = sh.duration;
    out.push_back(cand);
  };

  if (prev_g == 0.0) {
    add_root(prev_v, prev_v, prev_g);
  }
  for (int i = 1; i <= kGrid; ++i) {
    const double v = c.v_min + (c.v_max - c.v_min) * i / kGrid;
    const double gv = g(v);
    if ((gv < 0.0) != (prev_g < 0.0) || gv == 0.0) {
      add_root(prev_v, v, prev_g);
    }
    prev_v = v;
    prev_g = gv;
  }

  const double g_hi = g(c.v_max);
  const Shape sh_hi = shape_at(c.v_max, s0, s1, c);
  if (g_hi < 0.0 && shape_ok(sh_hi, s0, c)) {
    Candidate cand;
    cand.v_peak = c.v_max;
    cand.cruise = -g_hi / c.v_max;
    cand.duration = sh_hi.duration + cand.cruise;
    out.push_back(cand);
  }
  const double g_lo = g(c.v_min);
  const Shape sh_lo = shape_at(c.v_min, s0, s1, c);
  if (g_lo > 0.0 && shape_ok(sh_lo, s0, c)) {
    Candidate cand;
    cand.v_peak = c.v_min;
    cand.cruise = -g_lo / c.v_min;
    cand.duration = sh_lo.duration + cand.cruise;
    out.push_back(cand);
  }
  return out;
}

AxisProfile build_profile(const AxisState& s0, const AxisState& s1,
                          const AxisConstraints& c, const Candidate& cand) {
  const Shape sh = shape_at(cand.v_peak, s0, s1, c);
  AxisProfile prof;
  AxisState s = s0;
  append_transition(prof.segments, s, sh.acc);
  append_phase(prof.segments, s, 0.0, cand.cruise);
  append_transition(prof.segments, s, sh.dec);
  prof.duration = 0.0;
  for (const Segment& seg : prof.segments) {
    prof.duration += seg.duration;
  }
  return prof;
}

bool states_equal(const AxisState& a, const AxisState& b) {
  return std::abs(a.p - b.p) < 1e-12 && std::abs(a.v - b.v) < 1e-12 &&
         std::abs(a.a - b.a) < 1e-12;
}

void check_boundary_state(const AxisState& s, const AxisConstraints& c,
                          const char* which, bool as_target = false) {
  const double tol = 1e-9;
  if (!s.finite()) {
    throw PlanError(std::string(which) + " state not finite");
  }
  if (s.v < c.v_min - tol || s.v > c.v_max + tol) {
    throw PlanError(std::string(which) + " velocity outside bounds");
  }
  if (s.a < c.a_min - tol || s.a > c.a_max + tol) {
    throw PlanError(std::string(which) + " acceleration outside bounds");
  }
  // Zeroing the acceleration at extreme jerk must not push v out of bounds.
  if (s.a > 0.0 && s.v + s.a * s.a / (-2.0 * c.j_min) > c.v_max + tol) {
    throw PlanError(std::string(which) + " state cannot stay below v_max");
  }
  if (s.a < 0.0 && s.v - s.a * s.a / (2.0 * c.j_max) < c.v_min - tol) {
    throw PlanError(std::string(which) + " state cannot stay above v_min");
  }
  // A target with nonzero acceleration is approached through a = 0; the
  // velocity at that crossing must itself be attainable.
  if (as_target) {
    if (s.a > 0.0 && s.v - s.a * s.a / (2.0 * c.j_max) < c.v_min - tol) {
      throw PlanError(std::string(which) + " state unreachable above v_min");
    }
    if (s.a < 0.0 && s.v + s.a * s.a / (-2.0 * c.j_min) > c.v_max + tol) {
      throw PlanError(std::string(which) + " state unreachable below v_max");
    }
  }
}

struct AxisProblem {
  AxisState s0, s1;
  AxisConstraints c;
  bool identity = false;
  double t_opt = 0.0;
  Candidate best;
};

AxisProblem setup_axis(const AxisState& s0, const AxisState& s1,
                       const AxisConstraints& c) {
  if (!c.valid()) {
    throw PlanError("invalid axis constraints");
  }
  check_boundary_state(s0, c, "start");
  check_boundary_state(s1, c, "target", true);
  AxisProblem pr{s0, s1, c};
  if (states_equal(s0, s1)) {
    pr.identity = true;
    return pr;
  }
  const auto cands = displacement_candidates(s0, s1, c);
  if (cands.empty()) {
    throw PlanError("no feasible velocity profile");
  }
  pr.best = *std::min_element(
      cands.begin(), cands.end(),
      [](const Candidate& a, const Candidate& b) { return a.duration < b.duration; });
  pr.t_opt = pr.best.duration;
  return pr;
}

// Pad a profile so its total duration is exactly t_total. Only used for
// sub-nanosecond solver residue; the injected zero-jerk tail is harmless at
// that scale.
void pad_to(AxisProfile& prof, double t_total) {
  const double delta = t_total - prof.duration;
  if (delta <= 0.0) {
    prof.duration = t_total;
    return;
  }
  if (delta > 5e-9) {
    throw PlanError("internal: profile duration residue too large");
  }
  Segment seg;
  seg.duration = delta;
  seg.jerk = 0.0;
  seg.start = prof.end_state();
  prof.segments.push_back(seg);
  prof.duration = t_total;
}

// Fixed-duration solve. On failure with gap != nullptr, *gap receives the
// smallest attainable duration >= t_fixed (kInf if none was found).
std::optional<AxisProfile> solve_fixed(const AxisProblem& pr, double t_fixed,
                                       double* gap) {
  if (gap) {
    *gap = kInf;
  }
  if (pr.identity) {
    if (std::abs(pr.s0.v) < 1e-12 && std::abs(pr.s0.a) < 1e-12) {
      AxisProfile prof;
      if (t_fixed > 0.0) {
        Segment seg;
        seg.duration = t_fixed;
        seg.jerk = 0.0;
        seg.start = pr.s0;
        prof.segments.push_back(seg);
      }
      prof.duration = t_fixed;
      return prof;
    }
    if (t_fixed <= 1e-9) {
      AxisProfile prof;
      prof.duration = 0.0;
      pad_to(prof, t_fixed);
      return prof;
    }
    // Moving boundary state: fall through to the dip search below.
  } else if (t_fixed < pr.t_opt - 1e-9) {
    return std::nullopt;
  } else if (t_fixed <= pr.t_opt + 1e-9) {
    AxisProfile prof = build_profile(pr.s0, pr.s1, pr.c, pr.best);
    pad_to(prof, t_fixed);
    return prof;
  }

  const double dist = pr.s1.p - pr.s0.p;

  // Dwell solution: brake to zero velocity, wait, resume. Exact only when the
  // braking + resume displacement already matches.
  {
    const Shape sh = shape_at(0.0, pr.s0, pr.s1, pr.c);
    if (std::abs(sh.disp - dist) < 1e-9 && t_fixed >= sh.duration - 1e-9 &&
        shape_ok(sh, pr.s0, pr.c)) {
      Candidate cand;
      cand.v_peak = 0.0;
      cand.cruise = std::max(0.0, t_fixed - sh.duration);
      AxisProfile prof = build_profile(pr.s0, pr.s1, pr.c, cand);
      pad_to(prof, t_fixed);
      return prof;
    }
  }

  // Duration as a function of the cruise velocity, over the set where the
  // required cruise time is non-negative.
  auto eval_duration = [&](double v) -> double {
    if (std::abs(v) < 1e-9) {
      return kInf;
    }
    const Shape sh = shape_at(v, pr.s0, pr.s1, pr.c);
    if (!shape_ok(sh, pr.s0, pr.c)) {
      return -1.0;  // infeasible marker
    }
    const double cruise = (dist - sh.disp) / v;
    if (cruise < -1e-12) {
      return -1.0;
    }
    return sh.duration + std::max(cruise, 0.0);
  };

  std::vector<double> vs;
  constexpr int kGrid = 128;
  for (int i = 0; i <= kGrid; ++i) {
    vs.push_back(pr.c.v_min + (pr.c.v_max - pr.c.v_min) * i / kGrid);
  }
  const double vscale = std::max(-pr.c.v_min, pr.c.v_max);
  for (double m : {1e-3, 1e-5, 1e-7}) {
    vs.push_back(vscale * m);
    vs.push_back(-vscale * m);
  }
  if (!pr.identity) {
    vs.push_back(pr.best.v_peak);
  }
  std::sort(vs.begin(), vs.end());

  auto refine = [&](double vlo, double vhi, double hlo) -> AxisProfile {
    for (int i = 0; i < 90 && vhi - vlo > 1e-15; ++i) {
      const double mid = 0.5 * (vlo + vhi);
      double hm = eval_duration(mid);
      if (hm < 0.0) {
        hm = kInf;  // off the feasible set; treat as very long
      }
      if ((hm - t_fixed < 0.0) == (hlo < 0.0)) {
        vlo = mid;
        hlo = hm - t_fixed;
      } else {
        vhi = mid;
      }
    }
    const double v = 0.5 * (vlo + vhi);
    const Shape sh = shape_at(v, pr.s0, pr.s1, pr.c);
    Candidate cand;
    cand.v_peak = v;
    cand.cruise = std::max(0.0, (dist - sh.disp) / v);
    // Absorb the remaining duration error into the cruise phase.
    cand.cruise = std::max(0.0, cand.cruise + (t_fixed - sh.duration - cand.cruise));
    AxisProfile prof = build_profile(pr.s0, pr.s1, pr.c, cand);
    if (std::abs(prof.duration - t_fixed) > 1e-7) {
      throw PlanError("internal: fixed-time refinement failed");
    }
    pad_to(prof, t_fixed);
    return prof;
  };

  double best_above = kInf;
  double prev_v = 0.0, prev_h = -1.0;
  bool prev_ok = false;
  for (double v : vs) {
    const double dur = eval_duration(v);
    const bool ok = dur >= 0.0 && std::isfinite(dur);
    if (ok) {
      if (std::abs(dur - t_fixed) <= 1e-9) {
        const Shape sh = shape_at(v, pr.s0, pr.s1, pr.c);
        Candidate cand;
        cand.v_peak = v;
        cand.cruise = std::max(0.0, (dist - sh.disp) / v + (t_fixed - dur) / 1.0);
        AxisProfile prof = build_profile(pr.s0, pr.s1, pr.c, cand);
        pad_to(prof, t_fixed);
        return prof;
      }
      if (dur > t_fixed) {
        best_above = std::min(best_above, dur);
      }
      if (prev_ok && (prev_h < 0.0) != (dur - t_fixed < 0.0)) {
        return refine(prev_v, v, prev_h);
      }
    }
    prev_ok = ok;
    prev_v = v;
    prev_h = dur - t_fixed;
  }
  if (gap) {
    *gap = best_above;
  }
  return std::nullopt;
}

}  // namespace

AxisProfile plan_axis(const AxisState& start, const AxisState& target,
                      const AxisConstraints& c) {
  const AxisProblem pr = setup_axis(start, target, c);
  if (pr.identity) {
    return AxisProfile{};
  }
  return build_profile(start, target, c, pr.best);
}

AxisProfile plan_axis_fixed_time(const AxisState& start, const AxisState& target,
                                 const AxisConstraints& c, double t_fixed) {
  if (t_fixed < 0.0) {
    throw PlanError("t_fixed must be non-negative");
  }
  const AxisProblem pr = setup_axis(start, target, c);
  double gap = kInf;
  auto prof = solve_fixed(pr, t_fixed, &gap);
  if (!prof) {
    throw PlanError("t_fixed below the attainable duration for this axis");
  }
  return *prof;
}

Trajectory plan_3d(const State3& start, const State3& target,
                   const Constraints3& c) {
  std::array<AxisProblem, 3> problems = {
      setup_axis(start.x, target.x, c[0]),
      setup_axis(start.y, target.y, c[1]),
      setup_axis(start.z, target.z, c[2]),
  };

  double t_total = 0.0;
  for (const auto& pr : problems) {
    t_total = std::max(t_total, pr.t_opt);
  }

  std::array<AxisProfile, 3> profiles;
  bool done = false;
  for (int iter = 0; iter < 12 && !done; ++iter) {
    done = true;
    for (std::size_t i = 0; i < 3; ++i) {
      double gap = kInf;
      auto prof = solve_fixed(problems[i], t_total, &gap);
      if (prof) {
        profiles[i] = std::move(*prof);
      } else {
        // Duration gap on this axis: raise the common duration and retry.
        if (!std::isfinite(gap) || gap <= t_total) {
          throw PlanError("axis synchronization failed");
        }
        t_total = gap;
        done = false;
        break;
      }
    }
  }
  if (!done) {
    throw PlanError("axis synchronization did not converge");
  }

  Trajectory traj;
  traj.axes = std::move(profiles);
  traj.duration = t_total;
  traj.start = start;
  traj.target = target;
  traj.target.timestamp = start.timestamp + t_total;
  return traj;
}

}  // namespace evade
