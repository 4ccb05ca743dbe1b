#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "geodepth/camera.hpp"
#include "geodepth/scene.hpp"
#include "geodepth/skeleton.hpp"
#include "geodepth/uncertainty.hpp"

namespace geodepth {

/// SplitMix64 mixing of a base seed with a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

struct SceneConfig {
  CameraIntrinsics cam{1000.0, 1000.0, 640.0, 360.0};
  int image_width = 1280;
  int image_height = 720;
  double depth_min = 1.5;
  double depth_max = 12.0;
  double torso_min = 0.45;
  double torso_max = 0.55;
  /// Relative uniform jitter on every limb length.
  double limb_jitter = 0.10;
  double max_yaw_rad = 1.0;
  /// Root pixel kept at least this far inside the image border.
  double root_margin_px = 16.0;
  /// Reject placements whose padded 2D boxes intersect.
  bool non_overlapping = false;
  double box_padding_px = 24.0;
  /// Require every joint to project inside the image.
  bool fully_visible = false;
  int max_attempts = 1000;
};

struct NoiseModel {
  double pixel_sigma = 0.0;  // px, Gaussian on (u, v)
  double zrel_sigma = 0.0;   // m, Gaussian on z_rel
  double omega_error = 0.0;  // relative std of the assumed torso length
  double occlusion_rate = 0.0;

  void validate() const;
};

/// Deterministic in (n_persons, seed, cfg). Throws PlacementFailure when the
/// rejection sampler runs out of attempts.
SceneSample generate_scene(int n_persons, std::uint64_t seed,
                           const SceneConfig& cfg, std::int64_t frame_id = 0);

/// Marks non-root joints occluded with probability `rate`.
SceneSample with_occlusion(SceneSample scene, double rate, std::uint64_t seed);

struct Observation {
  std::vector<Pose25D> poses;      // noisy 2.5D, root z_rel exactly 0
  std::vector<double> z_root;      // true root depths
  std::vector<double> omega;       // assumed torso lengths (noisy)
  std::vector<std::vector<bool>> occluded;
};

Observation observe(const SceneSample& scene, const NoiseModel& noise,
                    std::uint64_t seed);

/// Stand-in for a learned depth-regression head: z_true plus Laplace noise
/// whose standard deviation is rel_sigma * z_true, rel_sigma drawn per
/// sample. A dishonest oracle reports a sigma unrelated to its true error.
struct RegressionOracle {
  double rel_sigma_min = 0.02;
  double rel_sigma_max = 0.15;
  bool honest = true;
  double sigma_floor = 1e-6;

  DepthEstimate sample(double z_true, std::mt19937_64& rng) const;
};

/// One draw of the depth fusion benchmark.
struct FusionSample {
  double z_true = 0.0;
  DepthEstimate reg;
  DepthEstimate geo;
  DepthEstimate fused;
};

struct FusionBenchConfig {
  int samples = 10000;
  int persons_per_scene = 1;
  NoiseModel noise{2.0, 0.02, 0.05, 0.0};
  RegressionOracle reg;
  SceneConfig scene;
};

/// Geometric depth from noisy observations with its sigma from first-order
/// propagation of the noise model; regression depth from the oracle.
std::vector<FusionSample> fusion_benchmark(const FusionBenchConfig& cfg,
                                           std::uint64_t seed);

struct FusionBenchSummary {
  double mean_abs_reg = 0.0;
  double mean_abs_geo = 0.0;
  double mean_abs_fused = 0.0;
  std::size_t count = 0;
};

FusionBenchSummary summarize(const std::vector<FusionSample>& samples);

/// Geometric sigma from first-order propagation of pixel, z_rel and torso
/// length noise through the closed-form depth.
double propagate_geo_sigma(const Pose25D& pose, const CameraIntrinsics& cam,
                           const TorsoPrior& omega, const SkeletonDef& skel,
                           double root_pixel_sigma, double neck_pixel_sigma,
                           double zrel_sigma, double omega_rel_error);

}  // namespace geodepth
