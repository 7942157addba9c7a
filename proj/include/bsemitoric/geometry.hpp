#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bsemitoric {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
/// Embedding coordinates: (x, y, z, u, v, 0) on S²×R², (x₁, y₁, z₁, x₂, y₂, z₂) on S²×S².
using Ambient = Eigen::Matrix<double, 6, 1>;

enum class Manifold { SphereTimesPlane, SphereTimesSphere };
enum class ChartKind { Cylindrical, Cartesian };

/// Chart on one sphere factor: cylindrical (θ, z) away from the poles, or the
/// Cartesian hemisphere chart (x, y) with sign(z) = sign, away from the equator.
struct FactorChart {
  ChartKind kind = ChartKind::Cylindrical;
  int sign = 1;

  bool operator==(const FactorChart&) const = default;
};

/// Product chart. On S²×R² only the first factor is a sphere; on S²×S² each
/// factor carries its own sphere chart, so mixed (cylindrical × Cartesian)
/// charts exist alongside the double charts and the atlas covers every point.
struct ChartId {
  Manifold manifold = Manifold::SphereTimesPlane;
  FactorChart first;
  FactorChart second;

  static ChartId cylindrical(Manifold m);
  static ChartId cartesian(Manifold m, int eps1, int eps2 = 1);
  static ChartId mixed(FactorChart first, FactorChart second);

  bool operator==(const ChartId&) const = default;
};

/// "cyl", "cart+", "cart-" on S²×R²; "cyl/cart-" style on S²×S².
std::string chart_label(const ChartId& chart);
std::optional<ChartId> parse_chart(Manifold manifold, std::string_view label);

/// Every chart of the atlas for the manifold, in a fixed order.
std::vector<ChartId> atlas(Manifold manifold);

/// Coordinates are in chart order: (θ,z,u,v), (x,y,u,v), (θ₁,z₁,θ₂,z₂),
/// (x₁,y₁,x₂,y₂), or the per-factor concatenation for mixed charts.
struct Point {
  ChartId chart;
  Vec4 coords = Vec4::Zero();
};

/// Points closer than this to a chart boundary (|z| = 1 for cylindrical,
/// x²+y² = 1 for Cartesian factors) are outside the chart.
inline constexpr double kChartMargin = 1e-9;

double normalize_angle(double angle);
bool in_domain(const ChartId& chart, const Vec4& coords);

/// Validates the coordinates and normalizes cylindrical angles into [0, 2π).
/// Throws ChartDomain.
Point make_point(const ChartId& chart, const Vec4& coords);
void require_in_domain(const Point& p);

Ambient embed(const Point& p);

/// Chart transition through the embedding. Throws OutOfOverlap when p is not
/// inside the target chart.
Point to_chart(const Point& p, const ChartId& target);
std::optional<Point> try_to_chart(const Point& p, const ChartId& target);

/// Chart-coordinate distance with angle differences wrapped into (-π, π].
/// Both points must be in the same chart.
double chart_distance(const Point& a, const Point& b);

/// Embedding plus its first and second derivatives with respect to the chart
/// coordinates: J(a, i) = ∂X_a/∂q_i and second[a](i, j) = ∂²X_a/∂q_i∂q_j.
struct ChartJet {
  Ambient position = Ambient::Zero();
  Eigen::Matrix<double, 6, 4> jacobian = Eigen::Matrix<double, 6, 4>::Zero();
  std::array<Mat4, 6> second{};
};

/// with_second = false skips the second derivatives (left unspecified).
ChartJet chart_jet(const Point& p, bool with_second = true);

/// Ambient index of the height coordinate of sphere factor 0 or 1.
constexpr int height_index(int factor) { return factor == 0 ? 2 : 5; }

/// The (b-)symplectic form of a catalogued system: sphere factor 0 carries
/// sphere_coeff · ω_S² (or · ω^b_S² when it is the singular factor), factor 1
/// carries second_coeff · ω_S² / ω^b_S² (S²×S²) or second_coeff · du∧dv (S²×R²).
struct SymplecticForm {
  Manifold manifold = Manifold::SphereTimesPlane;
  double sphere_coeff = -1.0;
  double second_coeff = 1.0;
  int singular_factor = -1;  // -1: smooth symplectic, otherwise 0 or 1
};

/// One basis slot of the (b-)coframe. Cylindrical factors order their slots
/// (z-slot, θ-slot); the z-slot is dz/z (vector side z∂z) on the singular
/// factor and dz elsewhere. Cartesian and plane factors use (dx, dy) / (du, dv).
struct FrameSlot {
  int coord = 0;
  bool logarithmic = false;
};

std::array<FrameSlot, 4> frame_slots(const SymplecticForm& form, const ChartId& chart);
std::array<std::string, 4> frame_labels(const SymplecticForm& form, const ChartId& chart);

struct BFrameMatrix {
  Mat4 entries = Mat4::Zero();
  std::array<std::string, 4> frame;
};

/// Matrix Ω(i, j) = ω(e_i, e_j) in the chart's b-frame. Throws ChartDomain.
BFrameMatrix omega_bframe(const SymplecticForm& form, const Point& p);

/// Canonical defining function of Z (1 for a smooth form).
double z_value(const SymplecticForm& form, const Point& p);

/// Converts a b-frame vector into chart-coordinate velocities (multiplies the
/// z∂z slots by z).
Vec4 frame_to_coordinates(const SymplecticForm& form, const Point& p, const Vec4& frame_vector);

}  // namespace bsemitoric
