#pragma once

#include <cstdint>
#include <vector>

#include "geodepth/camera.hpp"
#include "geodepth/skeleton.hpp"

namespace geodepth {

struct ScenePerson {
  Pose3D joints;
  /// Ground-truth root-neck distance; equals the pose's torso length.
  double omega = 0.0;
  std::vector<bool> occluded;
};

/// Ground truth for one frame.
struct SceneSample {
  CameraIntrinsics cam;
  SkeletonDef skeleton = SkeletonDef::mupots15();
  int image_width = 1280;
  int image_height = 720;
  std::vector<ScenePerson> persons;
  std::int64_t frame_id = 0;
  std::uint64_t rng_seed = 0;

  bool operator==(const SceneSample& other) const;
};

}  // namespace geodepth
