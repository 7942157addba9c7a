#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bsemitoric/systems.hpp"

namespace bsemitoric {

enum class WilliamsonType { EllipticElliptic, FocusFocus, EllipticHyperbolic, HyperbolicHyperbolic, Degenerate };

/// "elliptic-elliptic", "focus-focus", ...
std::string_view type_name(WilliamsonType type);

/// Eigenvalues sorted lexicographically by (real, imaginary).
using Spectrum = std::array<std::complex<double>, 4>;

struct LinearOperator {
  Mat4 entries = Mat4::Zero();
  std::string provenance;  // "A_L", "A_H" or "pencil(c1,c2)"
};

inline constexpr double kPencilGapTolerance = 1e-7;
inline constexpr double kWilliamsonTolerance = 1e-8;

struct FixedPointSearch {
  bool grid_scan = true;
  int grid = 32;
  double plane_half_width = 4.0;
  double margin = 1e-3;
};

struct FixedPointSet {
  std::vector<Point> points;  // analytic candidates first, then any extra basins
  int analytic = 0;
  int extra = 0;
  long grid_points = 0;
};

/// Gauss-Newton on the b-frame equations dL = dH = 0. Returns nullopt when the
/// iteration leaves the chart or does not reach |dF| <= tol.
std::optional<Point> refine_fixed_point(const SystemDef& sys, const Point& start, int max_iter = 50,
                                        double tol = 1e-12);

FixedPointSet find_fixed_points(const SystemDef& sys, const FixedPointSearch& search = {});

/// Pole label: "p+" / "p-" on S²×R², "p++" ... "p--" on S²×S² (signs of the heights).
std::string pole_label(const Point& p);

/// Pole with the given height signs, in the Cartesian chart that covers it.
Point pole(Manifold manifold, int eps1, int eps2 = 1);

/// A = Ω⁻¹ d²f. Throws NotFixedPoint.
LinearOperator linearize(const SystemDef& sys, const Point& p, Which which);

/// Dense eigen-decomposition. Throws NonConvergence.
Spectrum eig4(const Mat4& m);
double spectral_radius(const Spectrum& s);
double min_pairwise_gap(const Spectrum& s);

/// Characteristic polynomial λ⁴ + a[1]λ³ + a[2]λ² + a[3]λ + a[4] (a[0] = 1).
std::array<double, 5> charpoly(const Mat4& m);

struct PencilChoice {
  double c1 = 1.0;
  double c2 = 0.0;
  Spectrum spectrum{};
  double min_gap = 0.0;  // smallest pairwise eigenvalue distance
};

/// Fixed candidate list: eight (1, 2γ) pairs followed by 32 seeded random pairs.
const std::vector<std::pair<double, double>>& pencil_candidates();

/// First admissible candidate (pairwise gaps above kPencilGapTolerance · radius).
/// Throws NoAdmissiblePencil.
PencilChoice pencil_select(const Mat4& A_L, const Mat4& A_H);
std::vector<PencilChoice> admissible_pencils(const Mat4& A_L, const Mat4& A_H);

/// Throws UnrecognizedPattern.
WilliamsonType williamson_type(const Spectrum& s);

struct FixedPointReport {
  Point point;
  std::string label;
  WilliamsonType type = WilliamsonType::Degenerate;
  bool degenerate = true;
  PencilChoice pencil;
  Mat4 A_L = Mat4::Zero();
  Mat4 A_H = Mat4::Zero();
  double residual = 0.0;
  double z_value = 1.0;
  MomentumValue image;
  int admissible_count = 0;   // admissible pencils in the candidate list
  int agreeing_count = 0;     // of those, how many give the reported type
  double min_gap_pencil11 = 0.0;  // distance-to-degeneracy diagnostic for (1,1)
};

FixedPointReport classify_point(const SystemDef& sys, const Point& p);

struct ClassificationResult {
  FixedPointSet fixed_points;
  std::vector<FixedPointReport> reports;
};

ClassificationResult classify_system(const SystemDef& sys, const FixedPointSearch& search = {});

struct CriticalCouplings {
  double t_minus = 0.0;
  double t_plus = 0.0;
};

/// Throws BadParams unless 0 < R1 <= R2.
CriticalCouplings t_critical(double R1, double R2);

struct Biquadratic {
  double b = 0.0;
  double c = 0.0;
};

/// Closed-form λ⁴ + bλ² + c for the classical pencil A_L + A_H at p_{ε1,ε2}.
Biquadratic cam_charpoly_reference(int eps1, int eps2, double R1, double R2, double t);

/// b² − 4c of the (1,1) pencil at the double pole p_{ε1,ε2}.
double pencil_discriminant(SystemId id, double R1, double R2, double t, int eps1, int eps2);

struct TSweepRow {
  double t = 0.0;
  std::array<WilliamsonType, 4> types{};
  std::array<double, 4> discriminant{};
};

struct Transition {
  std::string pole;
  double t = 0.0;
  double formula = 0.0;  // nearest of t⁻, t⁺
  double error = 0.0;
};

struct TSweepResult {
  SystemId id = SystemId::CAM1;
  double R1 = 1.0;
  double R2 = 2.0;
  CriticalCouplings critical;
  std::vector<TSweepRow> rows;
  std::vector<Transition> transitions;
};

/// Double-pole order used by sweeps and reports: p++, p+-, p-+, p--.
inline constexpr std::array<std::array<int, 2>, 4> kDoublePoles{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

/// Type table on an even t grid over [0, 1] plus bisected sign changes of the
/// (1,1) pencil discriminant.
TSweepResult tsweep(SystemId id, double R1, double R2, int steps);

}  // namespace bsemitoric
