#pragma once

#include <cstddef>
#include <vector>

namespace geodepth {

/// Dense network outputs at a fixed output stride. Planes are row-major
/// (y, x); cell (x, y) corresponds to image pixel (x * stride, y * stride).
class DenseMaps {
 public:
  DenseMaps() = default;
  DenseMaps(int joint_count, int limb_count, int height, int width,
            int stride);

  int joint_count() const { return joints_; }
  int limb_count() const { return limbs_; }
  int height() const { return height_; }
  int width() const { return width_; }
  int stride() const { return stride_; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  float& heat(int joint, int y, int x) { return heatmaps_[plane(joint) + cell(y, x)]; }
  float heat(int joint, int y, int x) const { return heatmaps_[plane(joint) + cell(y, x)]; }

  /// component 0 is the x direction, 1 the y direction.
  float& paf(int limb, int component, int y, int x) {
    return pafs_[plane(2 * limb + component) + cell(y, x)];
  }
  float paf(int limb, int component, int y, int x) const {
    return pafs_[plane(2 * limb + component) + cell(y, x)];
  }

  /// channel indexes the J-1 non-root joints; component is (du, dv, dz_rel).
  float& offset(int channel, int component, int y, int x) {
    return offsets_[plane(3 * channel + component) + cell(y, x)];
  }
  float offset(int channel, int component, int y, int x) const {
    return offsets_[plane(3 * channel + component) + cell(y, x)];
  }

  std::vector<float>& heatmap_data() { return heatmaps_; }
  std::vector<float>& paf_data() { return pafs_; }
  std::vector<float>& offset_data() { return offsets_; }
  const std::vector<float>& heatmap_data() const { return heatmaps_; }
  const std::vector<float>& paf_data() const { return pafs_; }
  const std::vector<float>& offset_data() const { return offsets_; }

  bool operator==(const DenseMaps& other) const = default;

 private:
  std::size_t plane(int index) const {
    return static_cast<std::size_t>(index) * height_ * width_;
  }
  std::size_t cell(int y, int x) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int joints_ = 0;
  int limbs_ = 0;
  int height_ = 0;
  int width_ = 0;
  int stride_ = 1;
  std::vector<float> heatmaps_;
  std::vector<float> pafs_;
  std::vector<float> offsets_;
};

}  // namespace geodepth
