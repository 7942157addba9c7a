#include "bsemitoric/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "bsemitoric/error.hpp"
#include "bsemitoric/sampling.hpp"

namespace bsemitoric {

std::string_view type_name(WilliamsonType type) {
  switch (type) {
    case WilliamsonType::EllipticElliptic: return "elliptic-elliptic";
    case WilliamsonType::FocusFocus: return "focus-focus";
    case WilliamsonType::EllipticHyperbolic: return "elliptic-hyperbolic";
    case WilliamsonType::HyperbolicHyperbolic: return "hyperbolic-hyperbolic";
    case WilliamsonType::Degenerate: return "degenerate";
  }
  return "unknown";
}

// ---------------------------------------------------------------- fixed points

namespace {

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat84 = Eigen::Matrix<double, 8, 4>;

Vec8 stacked_residual(const SystemDef& sys, const Point& p) {
  const Mat24 dF = eval_dF(sys, p);
  Vec8 r;
  r.head<4>() = dF.row(0).transpose();
  r.tail<4>() = dF.row(1).transpose();
  return r;
}

bool same_point(const Point& a, const Point& b) { return (embed(a) - embed(b)).norm() < 1e-6; }

Point prefer_cartesian(const Point& p) {
  const Ambient x = embed(p);
  const int e1 = x[2] >= 0.0 ? 1 : -1;
  const int e2 = x[5] >= 0.0 ? 1 : -1;
  const ChartId target = p.chart.manifold == Manifold::SphereTimesPlane
                             ? ChartId::cartesian(Manifold::SphereTimesPlane, e1)
                             : ChartId::cartesian(Manifold::SphereTimesSphere, e1, e2);
  if (auto q = try_to_chart(p, target)) return *q;
  return p;
}

std::vector<double> axis_values(const FactorChart& f, bool sphere, int n, const FixedPointSearch& s,
                                bool first_coord) {
  std::vector<double> v(n);
  double lo, hi;
  if (!sphere) {
    lo = -s.plane_half_width;
    hi = s.plane_half_width;
  } else if (f.kind == ChartKind::Cylindrical && first_coord) {
    for (int i = 0; i < n; ++i) v[i] = 2.0 * std::numbers::pi * i / n;
    return v;
  } else {
    lo = -1.0 + s.margin;
    hi = 1.0 - s.margin;
  }
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// Candidate starting points: axis-local minima of |dF| well below the chart median.
std::vector<Point> grid_candidates(const SystemDef& sys, const ChartId& chart, const FixedPointSearch& s,
                                   long& evaluated) {
  const int n = s.grid;
  const bool two_spheres = chart.manifold == Manifold::SphereTimesSphere;
  const std::array<std::vector<double>, 4> ax{
      axis_values(chart.first, true, n, s, true), axis_values(chart.first, true, n, s, false),
      axis_values(chart.second, two_spheres, n, s, true), axis_values(chart.second, two_spheres, n, s, false)};
  const std::array<bool, 4> wraps{chart.first.kind == ChartKind::Cylindrical, false,
                                  two_spheres && chart.second.kind == ChartKind::Cylindrical, false};
  const long total = static_cast<long>(n) * n * n * n;
  std::vector<double> norm(total, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> valid;
  valid.reserve(total);
  for (long idx = 0; idx < total; ++idx) {
    long r = idx;
    Vec4 q;
    for (int a = 3; a >= 0; --a) {
      q[a] = ax[a][r % n];
      r /= n;
    }
    if (!in_domain(chart, q)) continue;
    const Point p{chart, q};
    if (sys.form.singular_factor >= 0 && z_value(sys.form, p) == 0.0) continue;
    norm[idx] = eval_dF(sys, p).norm();
    valid.push_back(norm[idx]);
  }
  evaluated += static_cast<long>(valid.size());
  if (valid.empty()) return {};
  std::nth_element(valid.begin(), valid.begin() + valid.size() / 2, valid.end());
  const double threshold = 0.05 * valid[valid.size() / 2];

  std::vector<Point> out;
  std::array<long, 4> stride{static_cast<long>(n) * n * n, static_cast<long>(n) * n, n, 1};
  for (long idx = 0; idx < total; ++idx) {
    const double v = norm[idx];
    if (std::isnan(v) || !(v < threshold)) continue;
    bool is_min = true;
    for (int a = 0; a < 4 && is_min; ++a) {
      const int i = static_cast<int>((idx / stride[a]) % n);
      for (int d : {-1, 1}) {
        int j = i + d;
        if (j < 0 || j >= n) {
          if (!wraps[a]) continue;
          j = (j + n) % n;
        }
        const double w = norm[idx + (j - i) * stride[a]];
        if (!std::isnan(w) && w < v) {
          is_min = false;
          break;
        }
      }
    }
    if (!is_min) continue;
    long r = idx;
    Vec4 q;
    for (int a = 3; a >= 0; --a) {
      q[a] = ax[a][r % n];
      r /= n;
    }
    out.push_back(Point{chart, q});
  }
  return out;
}

}  // namespace

std::optional<Point> refine_fixed_point(const SystemDef& sys, const Point& start, int max_iter, double tol) {
  Point p = start;
  if (!in_domain(p.chart, p.coords)) return std::nullopt;
  Vec8 r = stacked_residual(sys, p);
  for (int it = 0; it < max_iter && r.norm() > tol; ++it) {
    Mat84 J;
    J.topRows<4>() = frame_gradient_jacobian(sys, sys.L, p);
    J.bottomRows<4>() = frame_gradient_jacobian(sys, sys.H, p);
    const Vec4 step = J.colPivHouseholderQr().solve(-r);
    if (!step.allFinite()) return std::nullopt;
    double scale = 1.0;
    bool accepted = false;
    for (int k = 0; k < 20; ++k, scale *= 0.5) {
      const Vec4 q = p.coords + scale * step;
      if (!in_domain(p.chart, q)) continue;
      const Point trial{p.chart, q};
      const Vec8 rt = stacked_residual(sys, trial);
      if (rt.norm() < r.norm()) {
        p = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(r.norm() <= tol)) return std::nullopt;
  return make_point(p.chart, p.coords);
}

Point pole(Manifold manifold, int eps1, int eps2) {
  return make_point(ChartId::cartesian(manifold, eps1, eps2), Vec4::Zero());
}

std::string pole_label(const Point& p) {
  const Ambient x = embed(p);
  auto s = [](double h) { return h >= 0.0 ? std::string("+") : std::string("-"); };
  if (p.chart.manifold == Manifold::SphereTimesPlane) return "p" + s(x[2]);
  return "p" + s(x[2]) + s(x[5]);
}

FixedPointSet find_fixed_points(const SystemDef& sys, const FixedPointSearch& search) {
  FixedPointSet out;
  std::vector<Point> seeds;
  if (sys.manifold() == Manifold::SphereTimesPlane) {
    seeds = {pole(Manifold::SphereTimesPlane, 1), pole(Manifold::SphereTimesPlane, -1)};
  } else {
    for (const auto& e : kDoublePoles) seeds.push_back(pole(Manifold::SphereTimesSphere, e[0], e[1]));
  }
  for (const Point& s : seeds) {
    if (auto p = refine_fixed_point(sys, s)) {
      const Point q = prefer_cartesian(*p);
      if (std::none_of(out.points.begin(), out.points.end(), [&](const Point& o) { return same_point(o, q); })) {
        out.points.push_back(q);
      }
    }
  }
  out.analytic = static_cast<int>(out.points.size());
  if (!search.grid_scan) return out;

  for (const ChartId& chart : sys.charts()) {
    for (const Point& c : grid_candidates(sys, chart, search, out.grid_points)) {
      auto p = refine_fixed_point(sys, c);
      if (!p) continue;
      const Point q = prefer_cartesian(*p);
      if (std::none_of(out.points.begin(), out.points.end(), [&](const Point& o) { return same_point(o, q); })) {
        out.points.push_back(q);
        ++out.extra;
      }
    }
  }
  return out;
}

// ------------------------------------------------------------------ spectra

LinearOperator linearize(const SystemDef& sys, const Point& p, Which which) {
  const Hessians h = eval_hessians(sys, p);
  const Mat4 inv = omega_inverse(omega_bframe(sys.form, p).entries);
  return {inv * (which == Which::L ? h.L : h.H), which == Which::L ? "A_L" : "A_H"};
}

Spectrum eig4(const Mat4& m) {
  if (!m.allFinite()) throw Error(ErrorKind::NonConvergence, "non-finite matrix entries");
  Eigen::EigenSolver<Mat4> solver(m, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "eigenvalue iteration failed");
  Spectrum s;
  double radius = 0.0;
  for (int i = 0; i < 4; ++i) {
    s[i] = solver.eigenvalues()[i];
    radius = std::max(radius, std::abs(s[i]));
  }
  const double snap = 1e-14 * radius;
  for (auto& l : s) {
    double re = l.real(), im = l.imag();
    if (std::abs(re) <= snap) re = 0.0;
    if (std::abs(im) <= snap) im = 0.0;
    l = {re, im};
  }
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  return s;
}

double spectral_radius(const Spectrum& s) {
  double r = 0.0;
  for (const auto& l : s) r = std::max(r, std::abs(l));
  return r;
}

double min_pairwise_gap(const Spectrum& s) {
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) gap = std::min(gap, std::abs(s[i] - s[j]));
  }
  return gap;
}

std::array<double, 5> charpoly(const Mat4& m) {
  // Faddeev-LeVerrier recursion.
  std::array<double, 5> a{1.0, 0.0, 0.0, 0.0, 0.0};
  Mat4 M = Mat4::Zero();
  for (int k = 1; k <= 4; ++k) {
    M = m * M + a[k - 1] * Mat4::Identity();
    a[k] = -(m * M).trace() / k;
  }
  return a;
}

const std::vector<std::pair<double, double>>& pencil_candidates() {
  static const std::vector<std::pair<double, double>> list = [] {
    std::vector<std::pair<double, double>> v{{1, 2},   {1, 1},    {1, 0.5},  {1, 1.5},
                                             {1, 0.25}, {1, 0.75}, {1, 1.25}, {1, 1.75}};
    Rng rng(0x70e1c11ULL);
    for (int i = 0; i < 32; ++i) {
      const double c1 = rng.uniform(0.5, 1.5);
      const double c2 = rng.uniform(-2.0, 2.0);
      v.emplace_back(c1, c2);
    }
    return v;
  }();
  return list;
}

namespace {

std::optional<PencilChoice> try_pencil(const Mat4& A_L, const Mat4& A_H, double c1, double c2) {
  PencilChoice c{c1, c2, eig4(c1 * A_L + c2 * A_H), 0.0};
  c.min_gap = min_pairwise_gap(c.spectrum);
  const double r = spectral_radius(c.spectrum);
  if (r > 0.0 && c.min_gap > kPencilGapTolerance * r) return c;
  return std::nullopt;
}

}  // namespace

std::vector<PencilChoice> admissible_pencils(const Mat4& A_L, const Mat4& A_H) {
  std::vector<PencilChoice> out;
  for (const auto& [c1, c2] : pencil_candidates()) {
    if (auto c = try_pencil(A_L, A_H, c1, c2)) out.push_back(*c);
  }
  return out;
}

PencilChoice pencil_select(const Mat4& A_L, const Mat4& A_H) {
  for (const auto& [c1, c2] : pencil_candidates()) {
    if (auto c = try_pencil(A_L, A_H, c1, c2)) return *c;
  }
  throw Error(ErrorKind::NoAdmissiblePencil, "every candidate pencil has an eigenvalue collision");
}

WilliamsonType williamson_type(const Spectrum& s) {
  const double tol = kWilliamsonTolerance * spectral_radius(s);
  // Spectra of Hamiltonian matrices are symmetric under λ → −λ.
  for (const auto& l : s) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& m : s) nearest = std::min(nearest, std::abs(l + m));
    if (nearest > 1e-6 * spectral_radius(s)) {
      throw Error(ErrorKind::UnrecognizedPattern, "spectrum is not symmetric under negation");
    }
  }
  int imaginary = 0, real = 0, complex = 0;
  for (const auto& l : s) {
    const bool re0 = std::abs(l.real()) <= tol;
    const bool im0 = std::abs(l.imag()) <= tol;
    if (re0 && im0) throw Error(ErrorKind::UnrecognizedPattern, "zero eigenvalue");
    if (re0) {
      ++imaginary;
    } else if (im0) {
      ++real;
    } else {
      ++complex;
    }
  }
  if (imaginary == 4) return WilliamsonType::EllipticElliptic;
  if (complex == 4) return WilliamsonType::FocusFocus;
  if (imaginary == 2 && real == 2) return WilliamsonType::EllipticHyperbolic;
  if (real == 4) return WilliamsonType::HyperbolicHyperbolic;
  throw Error(ErrorKind::UnrecognizedPattern, "spectrum matches no Williamson pattern");
}

FixedPointReport classify_point(const SystemDef& sys, const Point& p) {
  FixedPointReport rep;
  rep.point = prefer_cartesian(p);
  rep.label = pole_label(rep.point);
  rep.residual = eval_dF(sys, rep.point).norm();
  rep.z_value = z_value(sys, rep.point);
  rep.image = eval_F(sys, rep.point);
  rep.A_L = linearize(sys, rep.point, Which::L).entries;
  rep.A_H = linearize(sys, rep.point, Which::H).entries;

  const Spectrum s11 = eig4(rep.A_L + rep.A_H);
  const double r11 = spectral_radius(s11);
  rep.min_gap_pencil11 = r11 > 0.0 ? min_pairwise_gap(s11) / r11 : 0.0;

  const auto admissible = admissible_pencils(rep.A_L, rep.A_H);
  rep.admissible_count = static_cast<int>(admissible.size());
  if (admissible.empty()) {
    rep.degenerate = true;
    rep.type = WilliamsonType::Degenerate;
    rep.pencil = {1.0, 1.0, s11, min_pairwise_gap(s11)};
    return rep;
  }
  rep.degenerate = false;
  rep.pencil = admissible.front();
  rep.type = williamson_type(rep.pencil.spectrum);
  for (const auto& c : admissible) {
    try {
      if (williamson_type(c.spectrum) == rep.type) ++rep.agreeing_count;
    } catch (const Error&) {
    }
  }
  return rep;
}

ClassificationResult classify_system(const SystemDef& sys, const FixedPointSearch& search) {
  ClassificationResult out;
  out.fixed_points = find_fixed_points(sys, search);
  for (const Point& p : out.fixed_points.points) out.reports.push_back(classify_point(sys, p));
  return out;
}

// ------------------------------------------------------------ CAM couplings

CriticalCouplings t_critical(double R1, double R2) {
  if (!(R1 > 0.0) || !(R1 <= R2) || !std::isfinite(R2)) {
    throw Error(ErrorKind::BadParams, "t_critical needs 0 < R1 <= R2");
  }
  const double root = 2.0 * std::sqrt(R1 * R2);
  return {R2 / (2.0 * R2 + R1 + root), R2 / (2.0 * R2 + R1 - root)};
}

Biquadratic cam_charpoly_reference(int eps1, int eps2, double R1, double R2, double t) {
  if (!(R1 > 0.0) || !(R2 > 0.0) || !(t >= 0.0 && t <= 1.0) || std::abs(eps1) != 1 || std::abs(eps2) != 1) {
    throw Error(ErrorKind::BadParams, "cam_charpoly_reference parameters out of range");
  }
  const double u = 1.0 - 2.0 * t;
  const double RR = R1 * R2;
  const double den = R1 * R1 * R2 * R2;
  double b = 0.0, k = 0.0;
  if (eps1 > 0 && eps2 > 0) {
    b = 1.0 / (R1 * R1) + 2.0 * (t * t + R2) / RR + t * (t + 2.0 * R2) / (R2 * R2) + 2.0;
    k = -t * t + t * R1 + t + RR + R2;
  } else if (eps1 > 0) {
    b = u * u / (R1 * R1) + 2.0 * (R2 - t * t - 2.0 * t * R2) / RR + t * (t + 2.0 * R2) / (R2 * R2) + 2.0;
    k = -t * t + t * R1 - 2.0 * t * R2 + t + RR + R2;
  } else if (eps2 > 0) {
    b = 1.0 / (R1 * R1) + 2.0 * (R2 - t * t) / RR + t * (t - 2.0 * R2) / (R2 * R2) + 2.0;
    k = t * t - t * R1 - t + RR + R2;
  } else {
    b = u * u / (R1 * R1) + 2.0 * (R2 + t * t - 2.0 * t * R2) / RR + t * (t - 2.0 * R2) / (R2 * R2) + 2.0;
    k = -t * t + t * R1 + 2.0 * t * R2 + t - RR - R2;
  }
  return {b, k * k / den};
}

double pencil_discriminant(SystemId id, double R1, double R2, double t, int eps1, int eps2) {
  SystemParams params;
  params.R1 = R1;
  params.R2 = R2;
  params.t = t;
  const SystemDef sys = make_system(id, params);
  const Point p = pole(Manifold::SphereTimesSphere, eps1, eps2);
  const Mat4 A = linearize(sys, p, Which::L).entries + linearize(sys, p, Which::H).entries;
  const auto a = charpoly(A);
  return a[2] * a[2] - 4.0 * a[4];
}

TSweepResult tsweep(SystemId id, double R1, double R2, int steps) {
  if (is_spin_oscillator(id) || id == SystemId::CAMBroken) {
    throw Error(ErrorKind::NotApplicable, "tsweep runs on the integrable angular-momenta systems");
  }
  if (steps < 2) throw Error(ErrorKind::BadParams, "tsweep needs at least two grid points");
  TSweepResult out;
  out.id = id;
  out.R1 = R1;
  out.R2 = R2;
  SystemParams params;
  params.R1 = R1;
  params.R2 = R2;
  make_system(id, params);  // validates R1, R2
  out.critical = t_critical(R1, R2);

  for (int k = 0; k < steps; ++k) {
    TSweepRow row;
    row.t = static_cast<double>(k) / (steps - 1);
    params.t = row.t;
    const SystemDef sys = make_system(id, params);
    for (int i = 0; i < 4; ++i) {
      const auto [e1, e2] = kDoublePoles[i];
      const Point p = pole(Manifold::SphereTimesSphere, e1, e2);
      row.types[i] = classify_point(sys, p).type;
      row.discriminant[i] = pencil_discriminant(id, R1, R2, row.t, e1, e2);
    }
    out.rows.push_back(row);
  }

  for (int i = 0; i < 4; ++i) {
    const auto [e1, e2] = kDoublePoles[i];
    for (std::size_t k = 0; k + 1 < out.rows.size(); ++k) {
      double a = out.rows[k].t, b = out.rows[k + 1].t;
      double fa = out.rows[k].discriminant[i];
      const double fb = out.rows[k + 1].discriminant[i];
      if (!(fa * fb < 0.0)) continue;
      while (b - a > 1e-12) {
        const double m = 0.5 * (a + b);
        const double fm = pencil_discriminant(id, R1, R2, m, e1, e2);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      Transition tr;
      tr.pole = pole_label(pole(Manifold::SphereTimesSphere, e1, e2));
      tr.t = 0.5 * (a + b);
      const double dm = std::abs(tr.t - out.critical.t_minus);
      const double dp = std::abs(tr.t - out.critical.t_plus);
      tr.formula = dm <= dp ? out.critical.t_minus : out.critical.t_plus;
      tr.error = std::min(dm, dp);
      out.transitions.push_back(tr);
    }
  }
  return out;
}

}  // namespace bsemitoric
