#pragma once

#include <cstdint>
#include <vector>

#include "geodepth/camera.hpp"
#include "geodepth/dense_maps.hpp"
#include "geodepth/scene.hpp"
#include "geodepth/skeleton.hpp"

namespace geodepth {

struct Peak {
  double u = 0.0;  // image pixels
  double v = 0.0;
  double score = 0.0;
  int cell_x = 0;
  int cell_y = 0;
};

/// Peaks per joint channel, each sorted by descending score.
using PeakSet = std::vector<std::vector<Peak>>;

struct PafConfig {
  int samples = 10;
  double min_fraction = 0.8;
  double min_dot = 0.05;
};

struct DecodeConfig {
  double nms_radius_px = 12.0;
  double min_score = 0.1;
  /// Heatmap confidence at or above which a joint keeps its heatmap position.
  double threshold = 0.3;
  PafConfig paf;
  bool use_heatmap = true;
  bool use_offset = true;
};

struct RenderConfig {
  int width_cells = 320;
  int height_cells = 180;
  int stride = 4;
  double sigma_cells = 2.0;
  double paf_width_cells = 1.0;
  int offset_radius_cells = 3;
  /// Gaussian noise written into the offset triples, per person and joint.
  double offset_pixel_sigma = 0.0;
  double offset_zrel_sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Strict 3x3 local maxima above min_score, suppressed within nms_radius_px
/// of a stronger peak, refined by a log-quadratic fit and scaled to pixels.
PeakSet extract_peaks(const DenseMaps& maps, double nms_radius_px,
                      double min_score);

/// Greedy part-affinity assembly. One pose is seeded per root peak; limbs
/// are attached outward along the skeleton tree. Returned poses carry (u, v)
/// and scores only, with valid=false for joints that were not reached.
std::vector<Pose25D> group_by_paf(const PeakSet& peaks, const DenseMaps& maps,
                                  const SkeletonDef& skel,
                                  const PafConfig& cfg = {});

/// Reads the offset triples at the cell containing `root`. Throws OutOfBounds
/// when that cell lies outside the map.
Pose25D decode_offsets(const Pixel& root, const DenseMaps& maps,
                       const SkeletonDef& skel);

/// Per joint: heatmap (u, v) if its score >= threshold, otherwise the offset
/// (u, v). z_rel always comes from the offset pose.
Pose25D fuse_structured(const Pose25D& heatmap_pose, const Pose25D& offset_pose,
                        double threshold);

/// extract_peaks -> group_by_paf -> decode_offsets -> fuse_structured, with
/// the heatmap/offset ablation toggles applied.
std::vector<Pose25D> decode_poses(const DenseMaps& maps,
                                  const SkeletonDef& skel,
                                  const DecodeConfig& cfg = {});

/// Synthetic network outputs for a ground-truth scene.
DenseMaps render_maps(const SceneSample& scene, const RenderConfig& cfg);

/// Render config whose canvas covers the scene image at the given stride.
RenderConfig render_config_for(const SceneSample& scene, int stride = 4);

}  // namespace geodepth
