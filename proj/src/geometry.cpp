#include "bsemitoric/geometry.hpp"

#include <cmath>
#include <numbers>

#include "bsemitoric/error.hpp"

namespace bsemitoric {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_sphere_factor(Manifold m, int factor) {
  return factor == 0 || m == Manifold::SphereTimesSphere;
}

const FactorChart& factor_chart(const ChartId& c, int factor) {
  return factor == 0 ? c.first : c.second;
}

FactorChart canonical(FactorChart f) {
  if (f.kind == ChartKind::Cylindrical) f.sign = 1;
  f.sign = f.sign >= 0 ? 1 : -1;
  return f;
}

std::string factor_label(const FactorChart& f) {
  if (f.kind == ChartKind::Cylindrical) return "cyl";
  return f.sign > 0 ? "cart+" : "cart-";
}

std::optional<FactorChart> parse_factor(std::string_view s) {
  if (s == "cyl") return FactorChart{ChartKind::Cylindrical, 1};
  if (s == "cart+") return FactorChart{ChartKind::Cartesian, 1};
  if (s == "cart-") return FactorChart{ChartKind::Cartesian, -1};
  return std::nullopt;
}

bool factor_in_domain(const FactorChart& f, double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  if (f.kind == ChartKind::Cylindrical) return std::abs(b) < 1.0 - kChartMargin;
  return a * a + b * b < 1.0 - kChartMargin;
}

// Sphere factor embedding from chart coordinates (a, b).
Eigen::Vector3d factor_embed(const FactorChart& f, double a, double b) {
  if (f.kind == ChartKind::Cylindrical) {
    const double s = std::sqrt(1.0 - b * b);
    return {s * std::cos(a), s * std::sin(a), b};
  }
  return {a, b, f.sign * std::sqrt(std::max(0.0, 1.0 - a * a - b * b))};
}

std::optional<Eigen::Vector2d> factor_coords(const FactorChart& f, const Eigen::Vector3d& x) {
  if (f.kind == ChartKind::Cylindrical) {
    if (!(std::abs(x[2]) < 1.0 - kChartMargin)) return std::nullopt;
    return Eigen::Vector2d(normalize_angle(std::atan2(x[1], x[0])), x[2]);
  }
  if (!(f.sign * x[2] > 0.0)) return std::nullopt;
  if (!(x[0] * x[0] + x[1] * x[1] < 1.0 - kChartMargin)) return std::nullopt;
  return Eigen::Vector2d(x[0], x[1]);
}

void factor_jet(const FactorChart& f, double a, double b, int amb, int crd, bool second, ChartJet& jet) {
  auto& J = jet.jacobian;
  if (f.kind == ChartKind::Cylindrical) {
    const double c = std::cos(a), sn = std::sin(a);
    const double s = std::sqrt(1.0 - b * b);
    const double zs = b / s;
    const double s3 = s * s * s;
    jet.position.segment<3>(amb) << s * c, s * sn, b;
    // coordinate crd is θ, crd + 1 is z
    J(amb, crd) = -s * sn;
    J(amb, crd + 1) = -zs * c;
    J(amb + 1, crd) = s * c;
    J(amb + 1, crd + 1) = -zs * sn;
    J(amb + 2, crd + 1) = 1.0;
    if (!second) return;
    Mat4& hx = jet.second[amb];
    hx(crd, crd) = -s * c;
    hx(crd, crd + 1) = hx(crd + 1, crd) = zs * sn;
    hx(crd + 1, crd + 1) = -c / s3;
    Mat4& hy = jet.second[amb + 1];
    hy(crd, crd) = -s * sn;
    hy(crd, crd + 1) = hy(crd + 1, crd) = -zs * c;
    hy(crd + 1, crd + 1) = -sn / s3;
    return;
  }
  const double eps = f.sign;
  const double s = std::sqrt(1.0 - a * a - b * b);
  const double s3 = s * s * s;
  jet.position.segment<3>(amb) << a, b, eps * s;
  J(amb, crd) = 1.0;
  J(amb + 1, crd + 1) = 1.0;
  J(amb + 2, crd) = -eps * a / s;
  J(amb + 2, crd + 1) = -eps * b / s;
  if (!second) return;
  Mat4& hz = jet.second[amb + 2];
  hz(crd, crd) = -eps * (1.0 - b * b) / s3;
  hz(crd, crd + 1) = hz(crd + 1, crd) = -eps * a * b / s3;
  hz(crd + 1, crd + 1) = -eps * (1.0 - a * a) / s3;
}

}  // namespace

ChartId ChartId::cylindrical(Manifold m) {
  return ChartId{m, {ChartKind::Cylindrical, 1},
                 {m == Manifold::SphereTimesSphere ? ChartKind::Cylindrical : ChartKind::Cartesian, 1}};
}

ChartId ChartId::cartesian(Manifold m, int eps1, int eps2) {
  ChartId c{m, canonical({ChartKind::Cartesian, eps1}), canonical({ChartKind::Cartesian, eps2})};
  if (m == Manifold::SphereTimesPlane) c.second = {ChartKind::Cartesian, 1};
  return c;
}

ChartId ChartId::mixed(FactorChart first, FactorChart second) {
  return ChartId{Manifold::SphereTimesSphere, canonical(first), canonical(second)};
}

std::string chart_label(const ChartId& chart) {
  if (chart.manifold == Manifold::SphereTimesPlane) return factor_label(chart.first);
  return factor_label(chart.first) + "/" + factor_label(chart.second);
}

std::optional<ChartId> parse_chart(Manifold manifold, std::string_view label) {
  if (manifold == Manifold::SphereTimesPlane) {
    auto f = parse_factor(label);
    if (!f) return std::nullopt;
    ChartId c = ChartId::cylindrical(manifold);
    c.first = *f;
    return c;
  }
  const auto slash = label.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  auto a = parse_factor(label.substr(0, slash));
  auto b = parse_factor(label.substr(slash + 1));
  if (!a || !b) return std::nullopt;
  return ChartId::mixed(*a, *b);
}

std::vector<ChartId> atlas(Manifold manifold) {
  if (manifold == Manifold::SphereTimesPlane) {
    return {ChartId::cylindrical(manifold), ChartId::cartesian(manifold, 1),
            ChartId::cartesian(manifold, -1)};
  }
  const FactorChart cyl{ChartKind::Cylindrical, 1};
  const FactorChart up{ChartKind::Cartesian, 1};
  const FactorChart down{ChartKind::Cartesian, -1};
  return {ChartId::mixed(cyl, cyl),   ChartId::mixed(up, up),     ChartId::mixed(up, down),
          ChartId::mixed(down, up),   ChartId::mixed(down, down), ChartId::mixed(cyl, up),
          ChartId::mixed(cyl, down),  ChartId::mixed(up, cyl),    ChartId::mixed(down, cyl)};
}

double normalize_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

bool in_domain(const ChartId& chart, const Vec4& q) {
  if (!factor_in_domain(chart.first, q[0], q[1])) return false;
  if (chart.manifold == Manifold::SphereTimesPlane) return std::isfinite(q[2]) && std::isfinite(q[3]);
  return factor_in_domain(chart.second, q[2], q[3]);
}

Point make_point(const ChartId& chart, const Vec4& coords) {
  if (!in_domain(chart, coords)) {
    throw Error(ErrorKind::ChartDomain, "coordinates outside chart " + chart_label(chart));
  }
  Point p{chart, coords};
  if (chart.first.kind == ChartKind::Cylindrical) p.coords[0] = normalize_angle(coords[0]);
  if (chart.manifold == Manifold::SphereTimesSphere && chart.second.kind == ChartKind::Cylindrical) {
    p.coords[2] = normalize_angle(coords[2]);
  }
  return p;
}

void require_in_domain(const Point& p) {
  if (!in_domain(p.chart, p.coords)) {
    throw Error(ErrorKind::ChartDomain, "point outside chart " + chart_label(p.chart));
  }
}

Ambient embed(const Point& p) {
  Ambient x = Ambient::Zero();
  x.head<3>() = factor_embed(p.chart.first, p.coords[0], p.coords[1]);
  if (p.chart.manifold == Manifold::SphereTimesSphere) {
    x.segment<3>(3) = factor_embed(p.chart.second, p.coords[2], p.coords[3]);
  } else {
    x[3] = p.coords[2];
    x[4] = p.coords[3];
  }
  return x;
}

std::optional<Point> try_to_chart(const Point& p, const ChartId& target) {
  if (target.manifold != p.chart.manifold) return std::nullopt;
  if (target == p.chart) return p;
  const Ambient x = embed(p);
  auto first = factor_coords(target.first, x.head<3>());
  if (!first) return std::nullopt;
  Point out{target, Vec4::Zero()};
  out.coords.head<2>() = *first;
  if (target.manifold == Manifold::SphereTimesSphere) {
    auto second = factor_coords(target.second, x.segment<3>(3));
    if (!second) return std::nullopt;
    out.coords.tail<2>() = *second;
  } else {
    out.coords[2] = x[3];
    out.coords[3] = x[4];
  }
  return out;
}

Point to_chart(const Point& p, const ChartId& target) {
  auto q = try_to_chart(p, target);
  if (!q) {
    throw Error(ErrorKind::OutOfOverlap,
                "point of chart " + chart_label(p.chart) + " is not in chart " + chart_label(target));
  }
  return *q;
}

double chart_distance(const Point& a, const Point& b) {
  if (!(a.chart == b.chart)) {
    throw Error(ErrorKind::OutOfOverlap, "chart_distance needs points in one chart");
  }
  Vec4 d = a.coords - b.coords;
  auto wrap = [](double x) { return x - kTwoPi * std::round(x / kTwoPi); };
  if (a.chart.first.kind == ChartKind::Cylindrical) d[0] = wrap(d[0]);
  if (a.chart.manifold == Manifold::SphereTimesSphere && a.chart.second.kind == ChartKind::Cylindrical) {
    d[2] = wrap(d[2]);
  }
  return d.norm();
}

ChartJet chart_jet(const Point& p, bool with_second) {
  ChartJet jet;
  if (with_second) {
    for (auto& m : jet.second) m.setZero();
  }
  factor_jet(p.chart.first, p.coords[0], p.coords[1], 0, 0, with_second, jet);
  if (p.chart.manifold == Manifold::SphereTimesSphere) {
    factor_jet(p.chart.second, p.coords[2], p.coords[3], 3, 2, with_second, jet);
  } else {
    jet.position[3] = p.coords[2];
    jet.position[4] = p.coords[3];
    jet.jacobian(3, 2) = 1.0;
    jet.jacobian(4, 3) = 1.0;
  }
  return jet;
}

std::array<FrameSlot, 4> frame_slots(const SymplecticForm& form, const ChartId& chart) {
  std::array<FrameSlot, 4> slots{};
  for (int f = 0; f < 2; ++f) {
    const int off = 2 * f;
    const FactorChart& fc = factor_chart(chart, f);
    if (is_sphere_factor(chart.manifold, f) && fc.kind == ChartKind::Cylindrical) {
      slots[off] = {off + 1, form.singular_factor == f};
      slots[off + 1] = {off, false};
    } else {
      slots[off] = {off, false};
      slots[off + 1] = {off + 1, false};
    }
  }
  return slots;
}

std::array<std::string, 4> frame_labels(const SymplecticForm& form, const ChartId& chart) {
  std::array<std::string, 4> labels;
  const bool two_spheres = chart.manifold == Manifold::SphereTimesSphere;
  for (int f = 0; f < 2; ++f) {
    const int off = 2 * f;
    const std::string sfx = two_spheres ? std::to_string(f + 1) : "";
    if (!is_sphere_factor(chart.manifold, f)) {
      labels[off] = "du";
      labels[off + 1] = "dv";
    } else if (factor_chart(chart, f).kind == ChartKind::Cylindrical) {
      labels[off] = form.singular_factor == f ? "dz" + sfx + "/z" + sfx : "dz" + sfx;
      labels[off + 1] = "dtheta" + sfx;
    } else {
      labels[off] = "dx" + sfx;
      labels[off + 1] = "dy" + sfx;
    }
  }
  return labels;
}

BFrameMatrix omega_bframe(const SymplecticForm& form, const Point& p) {
  require_in_domain(p);
  BFrameMatrix out;
  out.frame = frame_labels(form, p.chart);
  const Ambient x = embed(p);
  for (int f = 0; f < 2; ++f) {
    const int off = 2 * f;
    const double coeff = f == 0 ? form.sphere_coeff : form.second_coeff;
    double a = coeff;
    if (is_sphere_factor(p.chart.manifold, f)) {
      const bool singular = form.singular_factor == f;
      if (factor_chart(p.chart, f).kind == ChartKind::Cylindrical) {
        // ω_S² = dθ∧dz and ω^b_S² = dθ∧dz/z pair the (z-slot, θ-slot) to -1.
        a = -coeff;
      } else {
        const double z = x[height_index(f)];
        a = singular ? coeff / (z * z) : coeff / z;
      }
    }
    out.entries(off, off + 1) = a;
    out.entries(off + 1, off) = -a;
  }
  return out;
}

double z_value(const SymplecticForm& form, const Point& p) {
  if (form.singular_factor < 0) return 1.0;
  const int f = form.singular_factor;
  const FactorChart& fc = factor_chart(p.chart, f);
  if (fc.kind == ChartKind::Cylindrical) return p.coords[2 * f + 1];
  return embed(p)[height_index(f)];
}

Vec4 frame_to_coordinates(const SymplecticForm& form, const Point& p, const Vec4& v) {
  const auto slots = frame_slots(form, p.chart);
  Vec4 out = Vec4::Zero();
  for (int i = 0; i < 4; ++i) {
    out[slots[i].coord] = slots[i].logarithmic ? v[i] * p.coords[slots[i].coord] : v[i];
  }
  return out;
}

}  // namespace bsemitoric
