#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geodepth/dense_maps.hpp"
#include "geodepth/geo_depth.hpp"
#include "geodepth/metrics.hpp"
#include "geodepth/posedecode.hpp"
#include "geodepth/scene.hpp"
#include "geodepth/synth.hpp"
#include "geodepth/uncertainty.hpp"

namespace geodepth {

struct PipelineConfig {
  DecodeConfig decode;
  int stride = 4;
  bool use_geo = true;
  bool use_reg = true;
  /// Without adaptive fusion the two depths are averaged with equal weight.
  bool use_fusion = true;
  /// Use each person's ground-truth torso length (perturbed by the noise
  /// model) instead of `omega_default`.
  bool known_omega = true;
  double omega_default = 0.5;
  double tangent_eps = kDefaultTangentEps;
  double sigma_floor = 1e-6;
  /// Pixel noise assumed for heatmap-sourced joints when propagating the
  /// geometric depth uncertainty; offset-sourced joints use the noise model.
  double heatmap_pixel_sigma = 0.25;
  RegressionOracle reg;
  EvalConfig eval;
};

/// One decoded person through depth reasoning and lifting.
struct EstimatedPerson {
  Pose25D pose25d;
  std::optional<DepthEstimate> reg;
  std::optional<DepthEstimate> geo;
  DepthEstimate depth;
  Pose3D pose3d;
  int gt_index = -1;  // oracle association, -1 when none
};

struct FrameResult {
  std::vector<EstimatedPerson> persons;
  FrameEval eval;
};

/// Ground truth as metric inputs: camera-space joints and exact projections.
std::vector<PersonObs> ground_truth_obs(const SceneSample& scene);

/// Depth reasoning, fusion and lifting for already-decoded poses. Persons
/// with no usable depth are dropped.
std::vector<EstimatedPerson> estimate_persons(
    const std::vector<Pose25D>& poses, const SceneSample& scene,
    const NoiseModel& noise, const PipelineConfig& cfg, std::uint64_t seed);

/// Evaluates decoded persons against the scene ground truth.
FrameResult evaluate_persons(std::vector<EstimatedPerson> persons,
                             const SceneSample& scene,
                             const PipelineConfig& cfg);

/// maps -> decode -> geometric depth -> fusion -> lift -> metrics. When
/// `maps` is empty they are rendered from the scene, with offsets perturbed
/// by the noise model.
FrameResult run_frame(const SceneSample& scene, const NoiseModel& noise,
                      const PipelineConfig& cfg, std::uint64_t seed,
                      const DenseMaps* maps = nullptr);

/// run_frame over a batch, evaluated in parallel and folded in frame order.
/// `maps`, when given, holds one precomputed map set per scene.
EvalReport end_to_end(const std::vector<SceneSample>& scenes,
                      const NoiseModel& noise, const PipelineConfig& cfg,
                      std::uint64_t seed, int workers = 1,
                      const std::vector<DenseMaps>* maps = nullptr);

}  // namespace geodepth
