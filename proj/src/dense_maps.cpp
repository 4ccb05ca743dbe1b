#include "geodepth/dense_maps.hpp"

#include "geodepth/error.hpp"

namespace geodepth {

DenseMaps::DenseMaps(int joint_count, int limb_count, int height, int width,
                     int stride)
    : joints_(joint_count),
      limbs_(limb_count),
      height_(height),
      width_(width),
      stride_(stride) {
  if (joint_count < 1 || limb_count < 0 || height <= 0 || width <= 0 ||
      stride <= 0) {
    throw Error(ErrorCode::InvalidConfig, "dense map dimensions must be positive");
  }
  const std::size_t cells = static_cast<std::size_t>(height) * width;
  heatmaps_.assign(cells * joint_count, 0.0f);
  pafs_.assign(cells * 2 * limb_count, 0.0f);
  offsets_.assign(cells * 3 * (joint_count - 1), 0.0f);
}

}  // namespace geodepth
