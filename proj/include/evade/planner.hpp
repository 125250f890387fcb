#pragma once

#include "evade/trajectory.hpp"

namespace evade {

/// Minimum-duration jerk-limited profile between two full axis states.
/// Throws PlanError when a boundary state violates the constraints or cannot
/// be held inside the velocity bounds.
AxisProfile plan_axis(const AxisState& start, const AxisState& target,
                      const AxisConstraints& c);

/// Profile with a prescribed total duration >= the axis optimum. Throws
/// PlanError when T_fixed is below the optimum or falls in an unattainable
/// duration gap.
AxisProfile plan_axis_fixed_time(const AxisState& start, const AxisState& target,
                                 const AxisConstraints& c, double t_fixed);

/// Time-optimal synchronized 3D trajectory. T is the smallest duration
/// attainable by all three axes (>= max of the per-axis optima).
Trajectory plan_3d(const State3& start, const State3& target,
                   const Constraints3& c);

}  // namespace evade
