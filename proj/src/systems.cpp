#include "bsemitoric/systems.hpp"

#include <array>
#include <cmath>

#include "bsemitoric/error.hpp"

namespace bsemitoric {

namespace {

struct NameEntry {
  SystemId id;
  std::string_view name;
};

constexpr std::array<NameEntry, 8> kNames{{
    {SystemId::CSO, "cso"},
    {SystemId::bCSO, "bcso"},
    {SystemId::bCSOReversed, "bcsorev"},
    {SystemId::CAM, "cam"},
    {SystemId::CAM1, "cam1"},
    {SystemId::CAM2, "cam2"},
    {SystemId::CAM3, "cam3"},
    {SystemId::CAMBroken, "cambroken"},
}};

void set_sym(Eigen::Matrix<double, 6, 6>& q, int i, int j, double v) {
  q(i, j) = v;
  q(j, i) = v;
}

// (xu + yv) / 2 on S²×R².
BFunction oscillator_coupling() {
  BFunction f;
  set_sym(f.quadratic, 0, 3, 0.5);
  set_sym(f.quadratic, 1, 4, 0.5);
  return f;
}

// t (x₁x₂ + y₁y₂ + z₁z₂), plus (1 − t) z₁ either linear or, with log_z1, as a log.
BFunction angular_coupling(double t, bool log_z1) {
  BFunction f;
  for (int a = 0; a < 3; ++a) set_sym(f.quadratic, a, a + 3, t);
  if (log_z1) {
    f.log_factor = 0;
    f.log_coeff = 1.0 - t;
  } else {
    f.linear[2] = 1.0 - t;
  }
  return f;
}

void validate(SystemId id, const SystemParams& p) {
  if (is_spin_oscillator(id)) {
    if (!(p.rho1 > 0.0) || !(p.rho2 > 0.0) || !std::isfinite(p.rho1) || !std::isfinite(p.rho2)) {
      throw Error(ErrorKind::BadParams, "rho1 and rho2 must be positive and finite");
    }
    return;
  }
  if (!(p.R1 > 0.0) || !(p.R2 > 0.0) || !std::isfinite(p.R2)) {
    throw Error(ErrorKind::BadParams, "R1 and R2 must be positive and finite");
  }
  if (!(p.R1 < p.R2)) throw Error(ErrorKind::BadParams, "R1 must be smaller than R2");
  if (!(p.t >= 0.0 && p.t <= 1.0)) throw Error(ErrorKind::BadParams, "t must lie in [0, 1]");
}

struct Parts {
  Vec4 grad_g = Vec4::Zero();
  Mat4 hess_g;  // Hessian members are set only when requested
  Vec4 grad_log = Vec4::Zero();
  Mat4 hess_log;
  double height = 1.0;  // X_h of the log factor
  bool log_finite = true;
};

Parts derivative_parts(const BFunction& f, const ChartJet& jet, bool need_hessian = true) {
  Parts out;
  const Ambient G = f.linear + f.quadratic * jet.position;
  out.grad_g = jet.jacobian.transpose() * G;
  if (need_hessian) {
    out.hess_log.setZero();
    out.hess_g = jet.jacobian.transpose() * f.quadratic * jet.jacobian;
    for (int a = 0; a < 6; ++a) {
      if (G[a] != 0.0) out.hess_g += G[a] * jet.second[a];
    }
  }
  if (f.log_coeff != 0.0) {
    const int h = height_index(f.log_factor);
    out.height = jet.position[h];
    if (out.height == 0.0) {
      out.log_finite = false;
    } else {
      const double c = f.log_coeff;
      const Vec4 Jh = jet.jacobian.row(h).transpose();
      out.grad_log = (c / out.height) * Jh;
      if (need_hessian) {
        out.hess_log = (c / out.height) * jet.second[h] -
                       (c / (out.height * out.height)) * Jh * Jh.transpose();
      }
    }
  }
  return out;
}

Parts derivative_parts(const BFunction& f, const Point& p) { return derivative_parts(f, chart_jet(p)); }

Vec4 frame_components(const SymplecticForm& form, const BFunction& f, const Point& p, const Parts& d) {
  const auto slots = frame_slots(form, p.chart);
  Vec4 out;
  for (int i = 0; i < 4; ++i) {
    const int k = slots[i].coord;
    if (slots[i].logarithmic) {
      const double log_part = f.log_factor == form.singular_factor ? f.log_coeff : 0.0;
      out[i] = p.coords[k] * d.grad_g[k] + log_part;
    } else {
      out[i] = d.grad_g[k] + d.grad_log[k];
    }
  }
  return out;
}

}  // namespace

std::string_view system_name(SystemId id) {
  for (const auto& e : kNames) {
    if (e.id == id) return e.name;
  }
  return "unknown";
}

std::optional<SystemId> parse_system(std::string_view name) {
  for (const auto& e : kNames) {
    if (e.name == name) return e.id;
  }
  return std::nullopt;
}

const std::vector<SystemId>& integrable_systems() {
  static const std::vector<SystemId> ids{SystemId::CSO,  SystemId::bCSO, SystemId::bCSOReversed,
                                         SystemId::CAM,  SystemId::CAM1, SystemId::CAM2,
                                         SystemId::CAM3};
  return ids;
}

bool is_spin_oscillator(SystemId id) {
  return id == SystemId::CSO || id == SystemId::bCSO || id == SystemId::bCSOReversed;
}

SystemDef make_system(SystemId id, const SystemParams& params) {
  validate(id, params);
  SystemDef sys;
  sys.id = id;
  sys.params = params;

  if (is_spin_oscillator(id)) {
    const double r1 = params.rho1, r2 = params.rho2;
    sys.form = {Manifold::SphereTimesPlane, id == SystemId::bCSOReversed ? r1 : -r1, r2,
                id == SystemId::CSO ? -1 : 0};
    sys.L.quadratic(3, 3) = r2;
    sys.L.quadratic(4, 4) = r2;
    if (id == SystemId::CSO) {
      sys.L.linear[2] = r1;
    } else {
      sys.L.log_factor = 0;
      sys.L.log_coeff = id == SystemId::bCSO ? r1 : -r1;
    }
    sys.H = oscillator_coupling();
    return sys;
  }

  const double R1 = params.R1, R2 = params.R2, t = params.t;
  int singular = 0;
  if (id == SystemId::CAM) singular = -1;
  if (id == SystemId::CAM3) singular = 1;
  sys.form = {Manifold::SphereTimesSphere, -R1, -R2, singular};

  switch (id) {
    case SystemId::CAM:
    case SystemId::CAMBroken:
      sys.L.linear[2] = R1;
      sys.L.linear[5] = R2;
      break;
    case SystemId::CAM1:
    case SystemId::CAM2:
      sys.L.log_factor = 0;
      sys.L.log_coeff = R1;
      sys.L.linear[5] = R2;
      break;
    case SystemId::CAM3:
      sys.L.log_factor = 1;
      sys.L.log_coeff = R2;
      sys.L.linear[2] = R1;
      break;
    default:
      break;
  }
  const bool log_h = id == SystemId::CAM2 || id == SystemId::CAMBroken;
  sys.H = angular_coupling(t, log_h);
  return sys;
}

double z_value(const SystemDef& sys, const Point& p) { return z_value(sys.form, p); }

BFrameMatrix omega_bframe(const SystemDef& sys, const Point& p) { return omega_bframe(sys.form, p); }

double eval_function(const BFunction& f, const Point& p) {
  const Ambient x = embed(p);
  double value = f.linear.dot(x) + 0.5 * x.dot(f.quadratic * x);
  if (f.log_coeff != 0.0) {
    const FactorChart& fc = f.log_factor == 0 ? p.chart.first : p.chart.second;
    const double h = fc.kind == ChartKind::Cylindrical ? p.coords[2 * f.log_factor + 1]
                                                       : x[height_index(f.log_factor)];
    if (h == 0.0) throw Error(ErrorKind::OnSingularHypersurface, "log argument vanishes");
    value += f.log_coeff * std::log(std::abs(h));
  }
  return value;
}

MomentumValue eval_F(const SystemDef& sys, const Point& p) {
  require_in_domain(p);
  return {eval_function(sys.L, p), eval_function(sys.H, p)};
}

Vec4 frame_gradient(const SystemDef& sys, const BFunction& f, const Point& p) {
  require_in_domain(p);
  return frame_components(sys.form, f, p, derivative_parts(f, chart_jet(p, false), false));
}

Mat24 eval_dF(const SystemDef& sys, const Point& p) {
  require_in_domain(p);
  const ChartJet jet = chart_jet(p, false);
  Mat24 out;
  out.row(0) = frame_components(sys.form, sys.L, p, derivative_parts(sys.L, jet, false)).transpose();
  out.row(1) = frame_components(sys.form, sys.H, p, derivative_parts(sys.H, jet, false)).transpose();
  return out;
}

Mat4 frame_gradient_jacobian(const SystemDef& sys, const BFunction& f, const Point& p) {
  require_in_domain(p);
  const Parts d = derivative_parts(f, p);
  const auto slots = frame_slots(sys.form, p.chart);
  Mat4 out;
  for (int i = 0; i < 4; ++i) {
    const int k = slots[i].coord;
    if (slots[i].logarithmic) {
      out.row(i) = p.coords[k] * d.hess_g.row(k);
      out(i, k) += d.grad_g[k];
    } else {
      out.row(i) = d.hess_g.row(k) + d.hess_log.row(k);
    }
  }
  return out;
}

Vec4 coordinate_gradient(const BFunction& f, const Point& p) {
  require_in_domain(p);
  const Parts d = derivative_parts(f, p);
  if (!d.log_finite) throw Error(ErrorKind::OnSingularHypersurface, "coordinate gradient on Z");
  return d.grad_g + d.grad_log;
}

Mat4 coordinate_hessian(const BFunction& f, const Point& p) {
  require_in_domain(p);
  const Parts d = derivative_parts(f, p);
  if (!d.log_finite) throw Error(ErrorKind::OnSingularHypersurface, "coordinate Hessian on Z");
  return d.hess_g + d.hess_log;
}

Hessians eval_hessians(const SystemDef& sys, const Point& p) {
  const double residual = eval_dF(sys, p).norm();
  if (!(residual <= kFixedPointTolerance)) {
    throw Error(ErrorKind::NotFixedPoint, "|dF| = " + std::to_string(residual));
  }
  const auto slots = frame_slots(sys.form, p.chart);
  auto to_frame = [&](const Mat4& hc) {
    Mat4 out;
    for (int i = 0; i < 4; ++i) {
      const double wi = slots[i].logarithmic ? p.coords[slots[i].coord] : 1.0;
      for (int j = 0; j < 4; ++j) {
        const double wj = slots[j].logarithmic ? p.coords[slots[j].coord] : 1.0;
        out(i, j) = wi * wj * hc(slots[i].coord, slots[j].coord);
      }
    }
    return out;
  };
  return {to_frame(coordinate_hessian(sys.L, p)), to_frame(coordinate_hessian(sys.H, p))};
}

Mat4 omega_inverse(const Mat4& omega) {
  Mat4 inv = Mat4::Zero();
  for (int off = 0; off < 4; off += 2) {
    const double a = omega(off, off + 1);
    inv(off, off + 1) = -1.0 / a;
    inv(off + 1, off) = 1.0 / a;
  }
  return inv;
}

Vec4 hamiltonian_field(const SystemDef& sys, const Point& p, Which which) {
  const Mat4 inv = omega_inverse(omega_bframe(sys.form, p).entries);
  return inv * frame_gradient(sys, which == Which::L ? sys.L : sys.H, p);
}

double poisson_bracket(const SystemDef& sys, const Point& p) {
  const Mat24 dF = eval_dF(sys, p);
  const Mat4 inv = omega_inverse(omega_bframe(sys.form, p).entries);
  return dF.row(1).dot(inv * dF.row(0).transpose());
}

}  // namespace bsemitoric
