#include "geodepth/skeleton.hpp"

#include <queue>
#include <string>

#include "geodepth/error.hpp"
#include "geodepth/scene.hpp"

namespace geodepth {

SkeletonDef::SkeletonDef(std::vector<std::string> joint_names, int root_index,
                         int neck_index, std::vector<Limb> limbs)
    : names_(std::move(joint_names)),
      root_(root_index),
      neck_(neck_index),
      limbs_(std::move(limbs)) {
  const int j = joint_count();
  if (j < 2) throw Error(ErrorCode::InvalidConfig, "need at least two joints");
  if (root_ < 0 || root_ >= j || neck_ < 0 || neck_ >= j || root_ == neck_) {
    throw Error(ErrorCode::InvalidConfig,
                "root and neck must be distinct joint indices");
  }
  if (static_cast<int>(limbs_.size()) != j - 1) {
    throw Error(ErrorCode::InvalidConfig,
                "a spanning tree over " + std::to_string(j) + " joints needs " +
                    std::to_string(j - 1) + " limbs");
  }
  std::vector<std::vector<std::pair<int, int>>> adjacency(j);
  for (int i = 0; i < static_cast<int>(limbs_.size()); ++i) {
    const auto& l = limbs_[i];
    if (l.parent < 0 || l.parent >= j || l.child < 0 || l.child >= j ||
        l.parent == l.child) {
      throw Error(ErrorCode::InvalidConfig,
                  "limb " + std::to_string(i) + " has invalid endpoints");
    }
    adjacency[l.parent].push_back({l.child, i});
    adjacency[l.child].push_back({l.parent, i});
  }
  std::vector<bool> seen(j, false);
  std::queue<int> frontier;
  frontier.push(root_);
  seen[root_] = true;
  while (!frontier.empty()) {
    const int at = frontier.front();
    frontier.pop();
    for (const auto& [next, limb] : adjacency[at]) {
      if (seen[next]) continue;
      seen[next] = true;
      tree_order_.push_back({Limb{at, next}, limb});
      frontier.push(next);
    }
  }
  if (static_cast<int>(tree_order_.size()) != j - 1) {
    throw Error(ErrorCode::InvalidConfig, "limbs do not connect every joint");
  }
}

const SkeletonDef& SkeletonDef::mupots15() {
  static const SkeletonDef skel(
      {"head_top", "neck", "r_shoulder", "r_elbow", "r_wrist", "l_shoulder",
       "l_elbow", "l_wrist", "r_hip", "r_knee", "r_ankle", "l_hip", "l_knee",
       "l_ankle", "pelvis"},
      14, 1,
      {{14, 1}, {1, 0}, {1, 2}, {2, 3}, {3, 4}, {1, 5}, {5, 6}, {6, 7},
       {14, 8}, {8, 9}, {9, 10}, {14, 11}, {11, 12}, {12, 13}});
  return skel;
}

int SkeletonDef::offset_channel(int joint) const {
  if (joint == root_) return -1;
  return joint < root_ ? joint : joint - 1;
}

bool SkeletonDef::operator==(const SkeletonDef& other) const {
  if (names_ != other.names_ || root_ != other.root_ || neck_ != other.neck_ ||
      limbs_.size() != other.limbs_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    if (limbs_[i].parent != other.limbs_[i].parent ||
        limbs_[i].child != other.limbs_[i].child) {
      return false;
    }
  }
  return true;
}

Pose25D Pose25D::empty(int joint_count) {
  Pose25D p;
  p.joints.assign(joint_count, Point25D{});
  p.valid.assign(joint_count, false);
  p.source.assign(joint_count, JointSource::Heatmap);
  p.score.assign(joint_count, 0.0);
  return p;
}

Pose3D Pose3D::empty(int joint_count) {
  Pose3D p;
  p.joints.assign(joint_count, Point3D{});
  p.valid.assign(joint_count, false);
  return p;
}

TorsoPrior::TorsoPrior(double omega_m) : omega(omega_m) {
  if (!(omega > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "torso length must be positive");
  }
}

Pose3D lift_pose(const Pose25D& pose, double z_root,
                 const CameraIntrinsics& cam) {
  Pose3D out = Pose3D::empty(pose.joint_count());
  for (int k = 0; k < pose.joint_count(); ++k) {
    if (!pose.valid[k]) continue;
    out.joints[k] = back_project(pose.joints[k], z_root, cam);
    out.valid[k] = true;
  }
  return out;
}

double torso_length(const Pose3D& pose, const SkeletonDef& skel) {
  const int r = skel.root_index();
  const int n = skel.neck_index();
  if (r >= pose.joint_count() || n >= pose.joint_count() || !pose.valid[r] ||
      !pose.valid[n]) {
    throw Error(ErrorCode::MissingJoint, "root or neck joint is not valid");
  }
  return distance(pose.joints[r], pose.joints[n]);
}

bool SceneSample::operator==(const SceneSample& other) const {
  if (cam.fx != other.cam.fx || cam.fy != other.cam.fy ||
      cam.cx != other.cam.cx || cam.cy != other.cam.cy ||
      !(skeleton == other.skeleton) || image_width != other.image_width ||
      image_height != other.image_height || frame_id != other.frame_id ||
      rng_seed != other.rng_seed || persons.size() != other.persons.size()) {
    return false;
  }
  for (std::size_t i = 0; i < persons.size(); ++i) {
    const auto& a = persons[i];
    const auto& b = other.persons[i];
    if (a.omega != b.omega || a.occluded != b.occluded ||
        a.joints.valid != b.joints.valid ||
        a.joints.joints.size() != b.joints.joints.size()) {
      return false;
    }
    for (std::size_t k = 0; k < a.joints.joints.size(); ++k) {
      const auto& p = a.joints.joints[k];
      const auto& q = b.joints.joints[k];
      if (p.x != q.x || p.y != q.y || p.z != q.z) return false;
    }
  }
  return true;
}

}  // namespace geodepth
