#pragma once

#include <cstdint>
#include <vector>

#include "geodepth/camera.hpp"
#include "geodepth/metrics.hpp"
#include "geodepth/skeleton.hpp"
#include "geodepth/synth.hpp"

namespace fixtures {

struct GeoInstance {
  geodepth::Pose25D pose;
  geodepth::CameraIntrinsics cam;
  double omega = 0.5;   // torso length handed to the solver
  double z_true = 0.0;  // ground-truth root depth (0 when synthetic-only)
};

/// Persons from generated scenes, observed through `noise`, with the
/// (possibly perturbed) torso length the observation model assumes.
std::vector<GeoInstance> scene_instances(int count, std::uint64_t seed,
                                         const geodepth::NoiseModel& noise);

/// Random root/neck configurations with a torso length shorter than the
/// closest achievable root-neck distance, so no real root exists. The
/// distance minimizer lies well inside (0.1, 50].
std::vector<GeoInstance> no_real_root_instances(int count, std::uint64_t seed);

struct EvalFrame {
  std::vector<geodepth::PersonObs> gt;
  std::vector<geodepth::PersonObs> pred;
};

/// Up to four ground-truth persons, a perturbed prediction for most of them,
/// the odd distractor far from everyone, shuffled prediction order. Persons
/// are separated in the image so the optimal and greedy assignments agree.
EvalFrame random_eval_frame(std::uint64_t seed);

}  // namespace fixtures
