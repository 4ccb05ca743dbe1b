#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "geodepth/camera.hpp"

namespace geodepth {

struct Limb {
  int parent = 0;
  int child = 0;
};

/// Joint set with the root/neck anchors used by the geometric depth solve
/// and the limb tree used for part-affinity grouping.
class SkeletonDef {
 public:
  /// Throws InvalidConfig when the limb list is not a spanning tree, or the
  /// root/neck indices are out of range or equal.
  SkeletonDef(std::vector<std::string> joint_names, int root_index,
              int neck_index, std::vector<Limb> limbs);

  /// 15-joint MuPoTS layout with the pelvis as root.
  static const SkeletonDef& mupots15();

  int joint_count() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& joint_names() const { return names_; }
  int root_index() const { return root_; }
  int neck_index() const { return neck_; }
  const std::vector<Limb>& limbs() const { return limbs_; }

  /// Limbs re-oriented away from the root in breadth-first order, paired with
  /// the index of the original limb (which selects the PAF channel).
  const std::vector<std::pair<Limb, int>>& tree_order() const {
    return tree_order_;
  }

  /// Index of the offset channel for joint k (the root has none).
  int offset_channel(int joint) const;

  bool operator==(const SkeletonDef& other) const;

 private:
  std::vector<std::string> names_;
  int root_ = 0;
  int neck_ = 0;
  std::vector<Limb> limbs_;
  std::vector<std::pair<Limb, int>> tree_order_;
};

enum class JointSource : unsigned char { Heatmap, Offset };

struct Pose25D {
  std::vector<Point25D> joints;
  std::vector<bool> valid;
  std::vector<JointSource> source;
  /// Heatmap local-maximum value per joint; 0 where no peak was assigned.
  std::vector<double> score;

  static Pose25D empty(int joint_count);
  int joint_count() const { return static_cast<int>(joints.size()); }
};

struct Pose3D {
  std::vector<Point3D> joints;
  std::vector<bool> valid;

  static Pose3D empty(int joint_count);
  int joint_count() const { return static_cast<int>(joints.size()); }
};

struct TorsoPrior {
  double omega = 0.5;

  explicit TorsoPrior(double omega_m);
};

/// Back-projects every valid joint; invalid joints stay invalid.
Pose3D lift_pose(const Pose25D& pose, double z_root,
                 const CameraIntrinsics& cam);

/// Root-to-neck distance. Throws MissingJoint if either is invalid.
double torso_length(const Pose3D& pose, const SkeletonDef& skel);

}  // namespace geodepth
