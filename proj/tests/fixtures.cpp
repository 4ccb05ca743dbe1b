#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"

namespace fixtures {

using namespace geodepth;

std::vector<GeoInstance> scene_instances(int count, std::uint64_t seed,
                                         const NoiseModel& noise) {
  std::vector<GeoInstance> out;
  SceneConfig cfg;
  std::uint64_t frame = 0;
  while (static_cast<int>(out.size()) < count) {
    const auto scene = generate_scene(2, derive_seed(seed, frame), cfg);
    const auto obs = observe(scene, noise, derive_seed(seed, frame + 1000000));
    ++frame;
    for (std::size_t i = 0; i < obs.poses.size() && static_cast<int>(out.size()) < count; ++i) {
      out.push_back({obs.poses[i], scene.cam, obs.omega[i], obs.z_root[i]});
    }
  }
  return out;
}

std::vector<GeoInstance> no_real_root_instances(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1280), v(0, 720), zr(-1.0, 1.0),
      shrink(0.2, 0.9);
  const CameraIntrinsics cam{1000, 1000, 640, 360};
  const auto& skel = SkeletonDef::mupots15();
  std::vector<GeoInstance> out;
  while (static_cast<int>(out.size()) < count) {
    Pose25D pose = Pose25D::empty(skel.joint_count());
    auto& root = pose.joints[skel.root_index()];
    auto& neck = pose.joints[skel.neck_index()];
    root = {u(rng), v(rng), 0.0};
    neck = {u(rng), v(rng), zr(rng)};
    pose.valid[skel.root_index()] = pose.valid[skel.neck_index()] = true;
    if (std::hypot(neck.u - root.u, neck.v - root.v) < 5.0) continue;
    oracle::TorsoInstance t = oracle::instance_from_pose(pose, skel, cam, 1.0);
    const double z0 = oracle::min_distance_depth(t, -100.0, 100.0);
    if (!(z0 > 0.5 && z0 < 45.0)) continue;
    const double dmin = static_cast<double>(oracle::torso_distance(t, z0));
    if (!(dmin > 1e-3)) continue;
    out.push_back({pose, cam, shrink(rng) * dmin, 0.0});
  }
  return out;
}

EvalFrame random_eval_frame(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(0, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SceneConfig cfg;
  cfg.non_overlapping = true;
  cfg.box_padding_px = 60.0;
  const auto scene = generate_scene(count(rng), rng(), cfg);
  EvalFrame f;
  const double joint_sigma = 0.02 + 0.15 * unit(rng);
  for (const auto& person : scene.persons) {
    PersonObs g;
    g.pose3d = person.joints;
    g.pose2d = Pose25D::empty(15);
    for (int k = 0; k < 15; ++k) {
      const Pixel px = project(person.joints.joints[k], scene.cam);
      g.pose2d.joints[k] = {px.u, px.v, 0.0};
      g.pose2d.valid[k] = true;
    }
    // Occasionally hide a GT joint from the annotation.
    if (unit(rng) < 0.2) g.pose3d.valid[std::uniform_int_distribution<int>(0, 13)(rng)] = false;
    f.gt.push_back(g);
    if (unit(rng) < 0.15) continue;  // missed detection

    PersonObs p = g;
    p.pose3d.valid.assign(15, true);
    const Point3D shift{0.2 * gauss(rng), 0.1 * gauss(rng), 0.4 * gauss(rng)};
    for (int k = 0; k < 15; ++k) {
      auto& j = p.pose3d.joints[k];
      j.x += shift.x + joint_sigma * gauss(rng);
      j.y += shift.y + joint_sigma * gauss(rng);
      j.z += shift.z + joint_sigma * gauss(rng);
      p.pose2d.joints[k].u += 3.0 * gauss(rng);
      p.pose2d.joints[k].v += 3.0 * gauss(rng);
      if (k != 14 && unit(rng) < 0.05) p.pose3d.valid[k] = false;
    }
    f.pred.push_back(p);
  }
  // Near-ties in root depth exercise the PCOD equality band.
  if (f.pred.size() >= 2 && unit(rng) < 0.3) {
    f.pred[1].pose3d.joints[14].z = f.pred[0].pose3d.joints[14].z + 0.004;
  }
  if (unit(rng) < 0.3) {
    PersonObs d;
    d.pose3d = Pose3D::empty(15);
    d.pose2d = Pose25D::empty(15);
    for (int k = 0; k < 15; ++k) {
      d.pose3d.joints[k] = {unit(rng), unit(rng), 3.0 + unit(rng)};
      d.pose3d.valid[k] = true;
      d.pose2d.joints[k] = {-5000.0 - 10.0 * k, -5000.0, 0.0};
      d.pose2d.valid[k] = true;
    }
    f.pred.push_back(d);
  }
  std::shuffle(f.pred.begin(), f.pred.end(), rng);
  return f;
}

}  // namespace fixtures
