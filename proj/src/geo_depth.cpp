#include "geodepth/geo_depth.hpp"

#include <cmath>
#include <string>

#include "geodepth/error.hpp"

namespace geodepth {

namespace {

struct TorsoPixels {
  double u_root, v_root, u_neck, v_neck, z_neck;
};

TorsoPixels torso_pixels(const Pose25D& pose, const SkeletonDef& skel) {
  const int r = skel.root_index();
  const int n = skel.neck_index();
  if (r >= pose.joint_count() || n >= pose.joint_count() || !pose.valid[r] ||
      !pose.valid[n]) {
    throw Error(ErrorCode::MissingJoint, "root or neck joint is not valid");
  }
  const auto& root = pose.joints[r];
  const auto& neck = pose.joints[n];
  return {root.u, root.v, neck.u, neck.v, neck.z_rel};
}

// Normalized neck ray components and root-to-neck pixel offsets.
struct Terms {
  double du, dv;  // neck - root, pixels
  double xm, ym;  // neck - principal point, pixels
  double ifx2, ify2;
};

Terms terms(const TorsoPixels& t, const CameraIntrinsics& cam) {
  return {t.u_neck - t.u_root, t.v_neck - t.v_root, t.u_neck - cam.cx,
          t.v_neck - cam.cy, 1.0 / (cam.fx * cam.fx), 1.0 / (cam.fy * cam.fy)};
}

double neck_ray_norm2(const Terms& t) {
  return t.ifx2 * t.xm * t.xm + t.ify2 * t.ym * t.ym + 1.0;
}

QuadCoeffs leading_coeffs(const Terms& t, double z_neck) {
  QuadCoeffs q;
  q.a = t.ifx2 * t.du * t.du + t.ify2 * t.dv * t.dv;
  q.b = 2.0 * z_neck * (t.ifx2 * t.du * t.xm + t.ify2 * t.dv * t.ym);
  return q;
}

}  // namespace

QuadCoeffs quad_coeffs(const Pose25D& pose, const CameraIntrinsics& cam,
                       const TorsoPrior& omega, const SkeletonDef& skel) {
  const TorsoPixels px = torso_pixels(pose, skel);
  const Terms t = terms(px, cam);
  QuadCoeffs q = leading_coeffs(t, px.z_neck);
  q.c = px.z_neck * px.z_neck * neck_ray_norm2(t) - omega.omega * omega.omega;
  return q;
}

QuadCoeffs quad_coeffs_squared_bracket(const Pose25D& pose,
                                       const CameraIntrinsics& cam,
                                       const TorsoPrior& omega,
                                       const SkeletonDef& skel) {
  const TorsoPixels px = torso_pixels(pose, skel);
  const Terms t = terms(px, cam);
  QuadCoeffs q = leading_coeffs(t, px.z_neck);
  const double bracket = neck_ray_norm2(t);
  q.c = px.z_neck * px.z_neck * bracket * bracket - omega.omega * omega.omega;
  return q;
}

GeoDepthResult solve_geo_depth(const QuadCoeffs& q) {
  if (!(q.a > 0.0)) {
    throw Error(ErrorCode::DegenerateGeometry,
                "root and neck coincide in the image (a = " +
                    std::to_string(q.a) + ")");
  }
  GeoDepthResult r;
  r.coeffs = q;
  const double disc = q.discriminant();
  if (disc < 0.0) {
    r.branch = RootBranch::NoRealRoot;
    r.z = -q.b / (2.0 * q.a);
    return r;
  }
  r.branch = disc == 0.0 ? RootBranch::Tangent : RootBranch::TwoRoots;
  const double s = std::sqrt(disc);
  // Larger root; the b >= 0 form avoids cancellation in -b + s.
  if (q.b < 0.0) {
    r.z = (-q.b + s) / (2.0 * q.a);
  } else if (q.b + s > 0.0) {
    r.z = (2.0 * q.c) / (-q.b - s);
  } else {
    r.z = 0.0;
  }
  return r;
}

GeoDepthResult geo_depth(const Pose25D& pose, const CameraIntrinsics& cam,
                         const TorsoPrior& omega, const SkeletonDef& skel) {
  return solve_geo_depth(quad_coeffs(pose, cam, omega, skel));
}

std::vector<Point25D> GeoGradient::per_joint(const SkeletonDef& skel) const {
  std::vector<Point25D> g(skel.joint_count());
  g[skel.root_index()] = {du_root, dv_root, 0.0};
  g[skel.neck_index()] = {du_neck, dv_neck, dz_neck};
  return g;
}

GeoGradient geo_depth_grad(const Pose25D& pose, const CameraIntrinsics& cam,
                           const TorsoPrior& omega, const SkeletonDef& skel,
                           double tangent_eps) {
  const TorsoPixels px = torso_pixels(pose, skel);
  const Terms t = terms(px, cam);
  const GeoDepthResult res = geo_depth(pose, cam, omega, skel);
  const QuadCoeffs& q = res.coeffs;
  const double z = res.z;
  const double denom = 2.0 * q.a * z + q.b;
  if (res.branch == RootBranch::NoRealRoot || std::abs(denom) < tangent_eps) {
    throw Error(ErrorCode::TangentSingularity,
                "|2aZ + b| = " + std::to_string(std::abs(denom)) +
                    " below tangent threshold");
  }
  const double zm = px.z_neck;

  // Partials of (a, b, c) for each parameter; dZ = -(Z^2 da + Z db + dc)/denom.
  auto dz = [&](double da, double db, double dc) {
    return -(z * z * da + z * db + dc) / denom;
  };
  GeoGradient g;
  g.du_root = dz(-2.0 * t.ifx2 * t.du, -2.0 * zm * t.ifx2 * t.xm, 0.0);
  g.dv_root = dz(-2.0 * t.ify2 * t.dv, -2.0 * zm * t.ify2 * t.ym, 0.0);
  g.du_neck = dz(2.0 * t.ifx2 * t.du, 2.0 * zm * t.ifx2 * (t.xm + t.du),
                 2.0 * zm * zm * t.ifx2 * t.xm);
  g.dv_neck = dz(2.0 * t.ify2 * t.dv, 2.0 * zm * t.ify2 * (t.ym + t.dv),
                 2.0 * zm * zm * t.ify2 * t.ym);
  g.dz_neck = dz(0.0, 2.0 * (t.ifx2 * t.du * t.xm + t.ify2 * t.dv * t.ym),
                 2.0 * zm * neck_ray_norm2(t));
  g.domega = dz(0.0, 0.0, -2.0 * omega.omega);
  return g;
}

double geo_loss(double z_geo, double z_gt, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw Error(ErrorCode::NonPositiveSigma,
                "sigma2 = " + std::to_string(sigma2));
  }
  return std::abs(z_geo - z_gt) / sigma2 + std::log(sigma2);
}

std::vector<Point25D> geo_loss_grad(const Pose25D& pose,
                                    const CameraIntrinsics& cam,
                                    const TorsoPrior& omega,
                                    const SkeletonDef& skel, double z_gt,
                                    double sigma2, double tangent_eps) {
  if (!(sigma2 > 0.0)) {
    throw Error(ErrorCode::NonPositiveSigma,
                "sigma2 = " + std::to_string(sigma2));
  }
  const double z = geo_depth(pose, cam, omega, skel).z;
  const double residual = z - z_gt;
  const double dloss_dz =
      residual > 0.0 ? 1.0 / sigma2 : (residual < 0.0 ? -1.0 / sigma2 : 0.0);
  auto g = geo_depth_grad(pose, cam, omega, skel, tangent_eps).per_joint(skel);
  for (auto& j : g) {
    j.u *= dloss_dz;
    j.v *= dloss_dz;
    j.z_rel *= dloss_dz;
  }
  return g;
}

}  // namespace geodepth
