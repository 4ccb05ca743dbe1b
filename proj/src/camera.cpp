#include "geodepth/camera.hpp"

#include <cmath>
#include <string>

#include "geodepth/error.hpp"

namespace geodepth {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw Error(ErrorCode::InvalidConfig, "focal lengths must be positive");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy)) {
    throw Error(ErrorCode::InvalidConfig, "principal point must be finite");
  }
}

Point3D back_project(const Point25D& p, double z_root,
                     const CameraIntrinsics& cam) {
  const double z = z_root + p.z_rel;
  if (!(z > 0.0)) {
    throw Error(ErrorCode::DegenerateDepth,
                "absolute depth " + std::to_string(z) + " is not positive");
  }
  return {z * (p.u - cam.cx) / cam.fx, z * (p.v - cam.cy) / cam.fy, z};
}

Pixel project(const Point3D& p, const CameraIntrinsics& cam) {
  if (!(p.z > 0.0)) {
    throw Error(ErrorCode::DegenerateDepth,
                "point depth " + std::to_string(p.z) + " is not positive");
  }
  return {cam.fx * p.x / p.z + cam.cx, cam.fy * p.y / p.z + cam.cy};
}

double distance(const Point3D& a, const Point3D& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace geodepth
