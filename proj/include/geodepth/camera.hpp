#pragma once

namespace geodepth {

/// Pinhole intrinsics in pixels. No skew, no distortion.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  /// Throws InvalidConfig unless fx, fy > 0 and cx, cy finite.
  void validate() const;
};

/// Camera-centric position in meters.
struct Point3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Point3D&) const = default;
};

struct Pixel {
  double u = 0.0;
  double v = 0.0;

  bool operator==(const Pixel&) const = default;
};

/// Image position plus depth relative to the owning person's root joint.
struct Point25D {
  double u = 0.0;
  double v = 0.0;
  double z_rel = 0.0;

  bool operator==(const Point25D&) const = default;
};

/// Lifts a 2.5D point to camera space at absolute depth z_root + z_rel.
/// Throws DegenerateDepth when that depth is not positive.
Point3D back_project(const Point25D& p, double z_root,
                     const CameraIntrinsics& cam);

/// Throws DegenerateDepth when p.z <= 0.
Pixel project(const Point3D& p, const CameraIntrinsics& cam);

double distance(const Point3D& a, const Point3D& b);

}  // namespace geodepth
