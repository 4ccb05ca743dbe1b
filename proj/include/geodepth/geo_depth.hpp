#pragma once

#include <vector>

#include "geodepth/camera.hpp"
#include "geodepth/skeleton.hpp"

namespace geodepth {

inline constexpr double kDefaultTangentEps = 1e-8;

/// a*Z^2 + b*Z + c = 0 in the root depth Z.
struct QuadCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double discriminant() const { return b * b - 4.0 * a * c; }
  double eval(double z) const { return (a * z + b) * z + c; }
};

enum class RootBranch { TwoRoots, Tangent, NoRealRoot };

struct GeoDepthResult {
  double z = 0.0;
  QuadCoeffs coeffs;
  RootBranch branch = RootBranch::TwoRoots;

  /// False for a non-positive depth; such results must not be fused.
  bool physical() const { return z > 0.0; }
};

/// Coefficients of |P_neck(Z) - P_root(Z)|^2 = omega^2 with the root at
/// depth Z and the neck at Z + z_rel_neck. Throws MissingJoint.
QuadCoeffs quad_coeffs(const Pose25D& pose, const CameraIntrinsics& cam,
                       const TorsoPrior& omega, const SkeletonDef& skel);

/// Variant whose constant term squares the bracket, kept only to show that
/// it disagrees with the distance constraint.
QuadCoeffs quad_coeffs_squared_bracket(const Pose25D& pose,
                                       const CameraIntrinsics& cam,
                                       const TorsoPrior& omega,
                                       const SkeletonDef& skel);

/// Larger root when real, otherwise the minimizer -b/(2a) of the squared
/// torso-length residual. Throws DegenerateGeometry when a == 0.
GeoDepthResult solve_geo_depth(const QuadCoeffs& coeffs);

/// Convenience: quad_coeffs followed by solve_geo_depth.
GeoDepthResult geo_depth(const Pose25D& pose, const CameraIntrinsics& cam,
                         const TorsoPrior& omega, const SkeletonDef& skel);

/// dZ/d(u_root, v_root, u_neck, v_neck, z_rel_neck), plus dZ/d(omega).
struct GeoGradient {
  double du_root = 0.0;
  double dv_root = 0.0;
  double du_neck = 0.0;
  double dv_neck = 0.0;
  double dz_neck = 0.0;
  double domega = 0.0;

  /// Gradient laid out per joint as (du, dv, dz_rel); zero away from the
  /// root and neck.
  std::vector<Point25D> per_joint(const SkeletonDef& skel) const;
};

/// Implicit differentiation of the quadratic at its selected root. Throws
/// TangentSingularity when |2aZ + b| < tangent_eps, which includes the
/// no-real-root branch where the denominator vanishes identically.
GeoGradient geo_depth_grad(const Pose25D& pose, const CameraIntrinsics& cam,
                           const TorsoPrior& omega, const SkeletonDef& skel,
                           double tangent_eps = kDefaultTangentEps);

/// |z_geo - z_gt| / sigma2 + log(sigma2). Throws NonPositiveSigma.
double geo_loss(double z_geo, double z_gt, double sigma2);

/// Gradient of geo_loss through the closed-form depth, per joint.
std::vector<Point25D> geo_loss_grad(const Pose25D& pose,
                                    const CameraIntrinsics& cam,
                                    const TorsoPrior& omega,
                                    const SkeletonDef& skel, double z_gt,
                                    double sigma2,
                                    double tangent_eps = kDefaultTangentEps);

}  // namespace geodepth
