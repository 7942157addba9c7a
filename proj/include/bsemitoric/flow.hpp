#pragma once

#include <string_view>
#include <vector>

#include "bsemitoric/systems.hpp"

namespace bsemitoric {

enum class Method { RK4, RK45 };

struct IntegratorConfig {
  Method method = Method::RK45;
  double step = 1e-2;          // RK4 step, RK45 initial step
  double tolerance = 1e-10;    // RK45 absolute and relative tolerance
  double z_guard = 1e-8;       // stop when |z_value| drops below this
  double switch_margin = 0.05; // leave a chart this close to its boundary
  long max_steps = 10'000'000;
};

enum class FlowStatus { Completed, NearSingularHypersurface, StepFailure };
std::string_view status_name(FlowStatus s);

struct FlowState {
  double t = 0.0;
  Point point;
  MomentumValue value;
  double drift_L = 0.0;  // |L(t) - L(0)|
  double drift_H = 0.0;
};

struct FlowTrajectory {
  SystemId id = SystemId::CSO;
  SystemParams params;
  Which which = Which::L;
  IntegratorConfig config;
  std::vector<FlowState> states;
  double min_abs_z = 1.0;
  FlowStatus status = FlowStatus::Completed;
};

/// Integrates ẋ = X_which in chart coordinates, switching charts near their
/// boundaries. Stops early with status NearSingularHypersurface when the
/// guard trips, or StepFailure when the adaptive step underflows.
/// Throws ChartDomain for invalid p0 and OnSingularHypersurface when p0 is on Z.
FlowTrajectory integrate(const SystemDef& sys, const Point& p0, Which which, double t_max,
                         const IntegratorConfig& cfg = {});

/// Chart distance between p0 and its image under the X_L flow at time 2π.
/// Throws NotApplicable at rank-0 points and for CAMBroken (not an S¹ action).
double period_check(const SystemDef& sys, const Point& p0, const IntegratorConfig& cfg = {});

struct Conservation {
  double max_drift_L = 0.0;
  double max_drift_H = 0.0;
};

Conservation conservation_report(const FlowTrajectory& traj);

}  // namespace bsemitoric
