#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geodepth/camera.hpp"
#include "geodepth/geo_depth.hpp"
#include "geodepth/skeleton.hpp"
#include "geodepth/synth.hpp"

namespace geodepth {

inline constexpr double kArgminLo = 0.1;   // meters
inline constexpr double kArgminHi = 50.0;
inline constexpr int kArgminGrid = 4000;
inline constexpr double kFdStep = 1e-5;
inline constexpr double kGradAbsFloor = 1e-8;
inline constexpr double kNearTangent = 1e-4;  // sqrt of the discriminant

/// One root-depth problem: a 2.5D torso, its camera and a torso length.
struct TorsoCase {
  Pose25D pose;
  CameraIntrinsics cam;
  double omega = 0.5;
  double z_true = 0.0;  // 0 when the case is constructed, not observed
};

/// Persons of generated scenes seen through `noise`.
std::vector<TorsoCase> scene_torso_cases(int count, std::uint64_t seed,
                                         const NoiseModel& noise);

/// Torso lengths below the closest achievable root-neck distance.
std::vector<TorsoCase> no_real_root_cases(int count, std::uint64_t seed);

/// Torso lengths equal to the closest achievable distance (double root).
std::vector<TorsoCase> tangent_cases(int count, std::uint64_t seed);

/// Minimizer of (|P_neck - P_root| - omega)^2 over root depth in (lo, hi] by
/// a grid scan with golden-section refinement; the largest of equally good
/// minima is returned.
double numeric_root_depth(const TorsoCase& c, const SkeletonDef& skel,
                          double lo = kArgminLo, double hi = kArgminHi,
                          int grid = kArgminGrid);

struct OracleSummary {
  int checked = 0;
  int no_real_root = 0;
  int degenerate = 0;  // excluded
  double max_deviation = 0.0;
  bool passed(double tol) const { return max_deviation < tol; }
};

OracleSummary closed_form_vs_argmin(const std::vector<TorsoCase>& cases,
                                    const SkeletonDef& skel);

/// Parameters in GeoGradient order.
inline const std::array<std::string, 6> kGradComponents = {
    "u_root", "v_root", "u_neck", "v_neck", "z_rel_neck", "omega"};

struct GradcheckSummary {
  int checked = 0;
  int skipped_tangent = 0;
  std::array<double, 6> worst{};  // relative, or absolute for tiny components
  double max_error() const;
};

/// Central differences of the closed-form depth against geo_depth_grad.
/// Components below `abs_floor` in magnitude are compared absolutely.
/// Cases within `near_tangent` of a double root are skipped and counted.
GradcheckSummary gradcheck(const std::vector<TorsoCase>& cases,
                           const SkeletonDef& skel, double h = kFdStep,
                           double abs_floor = kGradAbsFloor,
                           double near_tangent = kNearTangent);

}  // namespace geodepth
