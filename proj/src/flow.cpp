#include "bsemitoric/flow.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "bsemitoric/error.hpp"
#include "bsemitoric/loci.hpp"

namespace bsemitoric {

namespace odeint = boost::numeric::odeint;

std::string_view status_name(FlowStatus s) {
  switch (s) {
    case FlowStatus::Completed: return "completed";
    case FlowStatus::NearSingularHypersurface: return "near-singular-hypersurface";
    case FlowStatus::StepFailure: return "step-failure";
  }
  return "unknown";
}

namespace {

using State = std::array<double, 4>;


// Integration variables: chart coordinates, except that the height of a
// cylindrical singular factor is carried as log|z| (its sign is invariant,
// since Z is). Its velocity is then the z∂z component of the b-frame field,
// and relative precision in z survives all the way down to the guard.
struct Coordinates {
  ChartId chart;
  int log_slot = -1;
  double sign = 1.0;

  Coordinates(const SymplecticForm& form, const Point& p) : chart(p.chart) {
    const int f = form.singular_factor;
    if (f < 0) return;
    const FactorChart& fc = f == 0 ? chart.first : chart.second;
    if (fc.kind != ChartKind::Cylindrical) return;
    log_slot = f == 0 ? 1 : 3;
    sign = p.coords[log_slot] < 0.0 ? -1.0 : 1.0;
  }

  State to_state(const Vec4& q) const {
    State x{q[0], q[1], q[2], q[3]};
    if (log_slot >= 0) x[log_slot] = std::log(std::abs(q[log_slot]));
    return x;
  }
  Vec4 to_coords(const State& x) const {
    Vec4 q(x[0], x[1], x[2], x[3]);
    if (log_slot >= 0) q[log_slot] = sign * std::exp(x[log_slot]);
    return q;
  }
};

struct Field {
  const SystemDef* sys;
  const Coordinates* coords;
  Which which;

  void operator()(const State& x, State& dxdt, double /*t*/) const {
    const Vec4 q = coords->to_coords(x);
    if (!in_domain(coords->chart, q)) {
      dxdt.fill(std::numeric_limits<double>::quiet_NaN());
      return;
    }
    const Point p{coords->chart, q};
    const Vec4 frame = hamiltonian_field(*sys, p, which);
    Vec4 v = frame_to_coordinates(sys->form, p, frame);
    if (coords->log_slot >= 0) v[coords->log_slot] = frame[coords->log_slot - 1];
    for (int i = 0; i < 4; ++i) dxdt[i] = v[i];
  }
};

// Per-factor chart change with hysteresis: cylindrical factors leave when
// |z| > 1 - margin, Cartesian factors when |z| < margin.
Point maybe_switch(const Point& p, double margin) {
  const Ambient x = embed(p);
  ChartId target = p.chart;
  auto adjust = [&](FactorChart& f, double z) {
    if (f.kind == ChartKind::Cylindrical && std::abs(z) > 1.0 - margin) {
      f = {ChartKind::Cartesian, z > 0.0 ? 1 : -1};
    } else if (f.kind == ChartKind::Cartesian && std::abs(z) < margin) {
      f = {ChartKind::Cylindrical, 1};
    }
  };
  adjust(target.first, x[2]);
  if (p.chart.manifold == Manifold::SphereTimesSphere) {
    adjust(target.second, x[5]);
  }
  if (target == p.chart) return p;
  return to_chart(p, target);
}

}  // namespace

FlowTrajectory integrate(const SystemDef& sys, const Point& p0, Which which, double t_max,
                         const IntegratorConfig& cfg) {
  require_in_domain(p0);
  if (!(cfg.step > 0.0) || !(cfg.tolerance > 0.0 && cfg.tolerance <= 1e-3) || !(t_max >= 0.0)) {
    throw Error(ErrorKind::BadParams, "integrator needs step > 0, tolerance in (0, 1e-3], t_max >= 0");
  }
  FlowTrajectory traj;
  traj.id = sys.id;
  traj.params = sys.params;
  traj.which = which;
  traj.config = cfg;

  const MomentumValue F0 = eval_F(sys, p0);
  const bool has_z = sys.form.singular_factor >= 0;
  auto record = [&](double t, const Point& p) {
    FlowState s{t, p, eval_F(sys, p), 0.0, 0.0};
    s.drift_L = std::abs(s.value.L - F0.L);
    s.drift_H = std::abs(s.value.H - F0.H);
    traj.states.push_back(s);
    if (has_z) traj.min_abs_z = std::min(traj.min_abs_z, std::abs(z_value(sys, p)));
  };
  auto guard_trips = [&](const Point& p) { return has_z && std::abs(z_value(sys, p)) < cfg.z_guard; };

  Point p = make_point(p0.chart, p0.coords);
  record(0.0, p);
  if (guard_trips(p)) {
    traj.status = FlowStatus::NearSingularHypersurface;
    return traj;
  }

  double t = 0.0;
  Coordinates coords(sys.form, p);
  Field field{&sys, &coords, which};
  odeint::runge_kutta4<State> rk4;
  auto controlled = odeint::make_controlled(cfg.tolerance, cfg.tolerance, odeint::runge_kutta_dopri5<State>());
  double dt = cfg.step;

  for (long n = 0; t < t_max && n < cfg.max_steps; ++n) {
    const Point switched = maybe_switch(p, cfg.switch_margin);
    if (!(switched.chart == coords.chart)) {
      p = switched;
      coords = Coordinates(sys.form, p);
      controlled.reset();
    }
    State x = coords.to_state(p.coords);
    double h = std::min(dt, t_max - t);
    if (cfg.method == Method::RK4) {
      rk4.do_step(field, x, t, h);
      if (!in_domain(coords.chart, coords.to_coords(x))) {
        traj.status = FlowStatus::StepFailure;
        return traj;
      }
      t = (t_max - t <= dt) ? t_max : t + h;
    } else {
      for (;;) {
        State trial = x;
        double tt = t;
        double hh = h;
        const auto res = controlled.try_step(field, trial, tt, hh);
        if (res == odeint::success && in_domain(coords.chart, coords.to_coords(trial))) {
          x = trial;
          t = (t_max - tt <= 1e-14 * std::max(1.0, t_max)) ? t_max : tt;
          dt = hh;
          break;
        }
        // A step that left the chart is retried at half length.
        if (res == odeint::success) {
          h *= 0.5;
          controlled.reset();
        } else {
          h = hh;
        }
        if (!(h > 1e-14 * std::max(1.0, std::abs(t)))) {
          traj.status = FlowStatus::StepFailure;
          return traj;
        }
      }
    }
    p = make_point(coords.chart, coords.to_coords(x));
    record(t, p);
    if (guard_trips(p)) {
      traj.status = FlowStatus::NearSingularHypersurface;
      return traj;
    }
  }
  if (t < t_max) traj.status = FlowStatus::StepFailure;
  return traj;
}

double period_check(const SystemDef& sys, const Point& p0, const IntegratorConfig& cfg) {
  if (sys.id == SystemId::CAMBroken) {
    throw Error(ErrorKind::NotApplicable, "the X_L flow of cambroken is not 2π-periodic");
  }
  if (rank_at(sys, p0).rank == 0) throw Error(ErrorKind::NotApplicable, "p0 is a fixed point");
  IntegratorConfig c = cfg;
  c.method = Method::RK45;
  c.tolerance = std::min(cfg.tolerance, 1e-12);
  const FlowTrajectory traj = integrate(sys, p0, Which::L, 2.0 * std::numbers::pi, c);
  if (traj.status != FlowStatus::Completed) {
    throw Error(ErrorKind::NumericalFailure, "period integration stopped: " + std::string(status_name(traj.status)));
  }
  const Point& end = traj.states.back().point;
  if (auto q = try_to_chart(end, p0.chart)) return chart_distance(*q, make_point(p0.chart, p0.coords));
  return (embed(end) - embed(p0)).norm();
}

Conservation conservation_report(const FlowTrajectory& traj) {
  Conservation c;
  for (const auto& s : traj.states) {
    c.max_drift_L = std::max(c.max_drift_L, s.drift_L);
    c.max_drift_H = std::max(c.max_drift_H, s.drift_H);
  }
  return c;
}

}  // namespace bsemitoric
