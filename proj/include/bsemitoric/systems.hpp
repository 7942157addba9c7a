#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsemitoric/geometry.hpp"

namespace bsemitoric {

enum class SystemId { CSO, bCSO, bCSOReversed, CAM, CAM1, CAM2, CAM3, CAMBroken };

/// Short command-line names: cso, bcso, bcsorev, cam, cam1, cam2, cam3, cambroken.
std::string_view system_name(SystemId id);
std::optional<SystemId> parse_system(std::string_view name);

/// The seven integrable systems (CAMBroken excluded).
const std::vector<SystemId>& integrable_systems();

bool is_spin_oscillator(SystemId id);

struct SystemParams {
  double rho1 = 1.0;
  double rho2 = 1.0;
  double R1 = 1.0;
  double R2 = 2.0;
  double t = 0.5;
};

/// f = log_coeff · log|X_h| + linear · X + ½ Xᵀ quadratic X on the ambient
/// embedding, where h is the height index of log_factor. Every catalogued L
/// and H has this shape.
struct BFunction {
  int log_factor = -1;
  double log_coeff = 0.0;
  Ambient linear = Ambient::Zero();
  Eigen::Matrix<double, 6, 6> quadratic = Eigen::Matrix<double, 6, 6>::Zero();
};

struct SystemDef {
  SystemId id = SystemId::CSO;
  SystemParams params;
  SymplecticForm form;
  BFunction L;
  BFunction H;

  Manifold manifold() const { return form.manifold; }
  std::vector<ChartId> charts() const { return atlas(form.manifold); }
};

/// Throws BadParams.
SystemDef make_system(SystemId id, const SystemParams& params);

enum class Which { L, H };

struct MomentumValue {
  double L = 0.0;
  double H = 0.0;
};

double z_value(const SystemDef& sys, const Point& p);
BFrameMatrix omega_bframe(const SystemDef& sys, const Point& p);

double eval_function(const BFunction& f, const Point& p);
/// Throws OnSingularHypersurface when a log argument vanishes.
MomentumValue eval_F(const SystemDef& sys, const Point& p);

/// Rows dL, dH in the b-frame of the chart (finite on Z).
using Mat24 = Eigen::Matrix<double, 2, 4>;
Mat24 eval_dF(const SystemDef& sys, const Point& p);
Vec4 frame_gradient(const SystemDef& sys, const BFunction& f, const Point& p);

/// Derivatives of the b-frame components of df with respect to the chart
/// coordinates: D(i, j) = ∂(df)_i / ∂q_j. Finite on Z.
Mat4 frame_gradient_jacobian(const SystemDef& sys, const BFunction& f, const Point& p);

/// Ordinary coordinate gradient and Hessian. Off Z only.
Vec4 coordinate_gradient(const BFunction& f, const Point& p);
Mat4 coordinate_hessian(const BFunction& f, const Point& p);

struct Hessians {
  Mat4 L = Mat4::Zero();
  Mat4 H = Mat4::Zero();
};

inline constexpr double kFixedPointTolerance = 1e-9;

/// Second derivatives in the chart's frame at a fixed point. Throws
/// NotFixedPoint when ‖dF‖ exceeds kFixedPointTolerance.
Hessians eval_hessians(const SystemDef& sys, const Point& p);

/// X_f = Ω⁻¹ · df in the b-frame.
Vec4 hamiltonian_field(const SystemDef& sys, const Point& p, Which which);

/// {L, H} = dH(X_L).
double poisson_bracket(const SystemDef& sys, const Point& p);

/// Inverse of a frame matrix built from 2×2 antisymmetric blocks.
Mat4 omega_inverse(const Mat4& omega);

}  // namespace bsemitoric
