#include "geodepth/posedecode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <tuple>

#include "geodepth/error.hpp"

namespace geodepth {

namespace {

// Vertex of the parabola through (-1, y0), (0, y1), (1, y2) shifted so the
// samples sit at offsets first, first + 1, first + 2 from the peak cell.
double parabola_vertex(double y0, double y1, double y2, int first) {
  const double curvature = y0 - 2.0 * y1 + y2;
  if (!(curvature < 0.0)) return 0.0;
  const double vertex = 0.5 * (y0 - y2) / curvature;  // relative to middle
  return vertex + (first + 1);
}

// Sub-cell offset of the peak along one axis. `sample(i)` reads the map at
// peak + i. Fits log values when all three are positive, which is exact for
// an isolated Gaussian.
template <typename Sample>
double refine_axis(Sample sample, int at, int extent) {
  if (extent < 3) return 0.0;
  int first = -1;
  if (at == 0) first = 0;
  if (at == extent - 1) first = -2;
  double y[3];
  bool positive = true;
  for (int i = 0; i < 3; ++i) {
    y[i] = sample(first + i);
    positive = positive && y[i] > 1e-30;
  }
  if (positive) {
    for (double& v : y) v = std::log(v);
  }
  const double d = parabola_vertex(y[0], y[1], y[2], first);
  return std::clamp(d, -1.0, 1.0);
}

}  // namespace

PeakSet extract_peaks(const DenseMaps& maps, double nms_radius_px,
                      double min_score) {
  PeakSet out(maps.joint_count());
  const int h = maps.height();
  const int w = maps.width();
  const double stride = maps.stride();
  for (int j = 0; j < maps.joint_count(); ++j) {
    std::vector<Peak> candidates;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double v = maps.heat(j, y, x);
        if (!(v > min_score)) continue;
        bool is_max = true;
        for (int dy = -1; dy <= 1 && is_max; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || !maps.in_bounds(x + dx, y + dy)) continue;
            if (maps.heat(j, y + dy, x + dx) >= v) {
              is_max = false;
              break;
            }
          }
        }
        if (!is_max) continue;
        const double fx = refine_axis(
            [&](int i) { return static_cast<double>(maps.heat(j, y, x + i)); },
            x, w);
        const double fy = refine_axis(
            [&](int i) { return static_cast<double>(maps.heat(j, y + i, x)); },
            y, h);
        candidates.push_back({(x + fx) * stride, (y + fy) * stride, v, x, y});
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Peak& a, const Peak& b) {
                return std::tie(b.score, a.cell_y, a.cell_x) <
                       std::tie(a.score, b.cell_y, b.cell_x);
              });
    const double r2 = nms_radius_px * nms_radius_px;
    for (const Peak& c : candidates) {
      const bool suppressed =
          std::any_of(out[j].begin(), out[j].end(), [&](const Peak& kept) {
            const double du = kept.u - c.u;
            const double dv = kept.v - c.v;
            return du * du + dv * dv < r2;
          });
      if (!suppressed) out[j].push_back(c);
    }
  }
  return out;
}

namespace {

struct LimbCandidate {
  double score;
  int from;  // peak index in the original limb's parent channel
  int to;    // peak index in the original limb's child channel
};

// Mean directional agreement of the PAF along the segment a->b, or nullopt
// when fewer than the required fraction of samples agree.
std::optional<double> limb_score(const DenseMaps& maps, int limb, const Peak& a,
                                 const Peak& b, const PafConfig& cfg) {
  const double du = b.u - a.u;
  const double dv = b.v - a.v;
  const double len = std::hypot(du, dv);
  if (len < 1e-9 || cfg.samples < 1) return std::nullopt;
  const double ux = du / len;
  const double uy = dv / len;
  const double stride = maps.stride();
  int agreeing = 0;
  double total = 0.0;
  for (int i = 0; i < cfg.samples; ++i) {
    const double t = cfg.samples == 1 ? 0.5 : static_cast<double>(i) / (cfg.samples - 1);
    const int x = static_cast<int>(std::lround((a.u + t * du) / stride));
    const int y = static_cast<int>(std::lround((a.v + t * dv) / stride));
    double dot = 0.0;
    if (maps.in_bounds(x, y)) {
      dot = maps.paf(limb, 0, y, x) * ux + maps.paf(limb, 1, y, x) * uy;
    }
    total += dot;
    if (dot > cfg.min_dot) ++agreeing;
  }
  if (agreeing < cfg.min_fraction * cfg.samples) return std::nullopt;
  return total / cfg.samples;
}

}  // namespace

std::vector<Pose25D> group_by_paf(const PeakSet& peaks, const DenseMaps& maps,
                                  const SkeletonDef& skel,
                                  const PafConfig& cfg) {
  const int jc = skel.joint_count();
  const int root = skel.root_index();
  if (static_cast<int>(peaks.size()) != jc) return {};

  std::vector<Pose25D> persons;
  std::vector<std::vector<int>> assigned;
  for (int i = 0; i < static_cast<int>(peaks[root].size()); ++i) {
    const Peak& p = peaks[root][i];
    Pose25D pose = Pose25D::empty(jc);
    pose.joints[root] = {p.u, p.v, 0.0};
    pose.valid[root] = true;
    pose.score[root] = p.score;
    persons.push_back(std::move(pose));
    assigned.emplace_back(jc, -1);
    assigned.back()[root] = i;
  }

  for (const auto& [oriented, limb_index] : skel.tree_order()) {
    const Limb& limb = skel.limbs()[limb_index];
    const auto& from_peaks = peaks[limb.parent];
    const auto& to_peaks = peaks[limb.child];
    std::vector<LimbCandidate> candidates;
    for (int i = 0; i < static_cast<int>(from_peaks.size()); ++i) {
      for (int k = 0; k < static_cast<int>(to_peaks.size()); ++k) {
        if (auto s = limb_score(maps, limb_index, from_peaks[i], to_peaks[k], cfg)) {
          candidates.push_back({*s, i, k});
        }
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const LimbCandidate& a, const LimbCandidate& b) {
                       return a.score > b.score;
                     });
    std::vector<bool> from_used(from_peaks.size(), false);
    std::vector<bool> to_used(to_peaks.size(), false);
    const bool forward = oriented.parent == limb.parent;
    for (const auto& c : candidates) {
      if (from_used[c.from] || to_used[c.to]) continue;
      from_used[c.from] = true;
      to_used[c.to] = true;
      // Attach outward: the joint nearer the root must already be placed.
      const int anchor_peak = forward ? c.from : c.to;
      const int new_peak = forward ? c.to : c.from;
      const auto& new_channel = forward ? to_peaks : from_peaks;
      for (std::size_t p = 0; p < persons.size(); ++p) {
        if (assigned[p][oriented.parent] != anchor_peak) continue;
        if (assigned[p][oriented.child] != -1) break;
        const Peak& np = new_channel[new_peak];
        assigned[p][oriented.child] = new_peak;
        persons[p].joints[oriented.child] = {np.u, np.v, 0.0};
        persons[p].valid[oriented.child] = true;
        persons[p].score[oriented.child] = np.score;
        break;
      }
    }
  }
  return persons;
}

Pose25D decode_offsets(const Pixel& root, const DenseMaps& maps,
                       const SkeletonDef& skel) {
  const double stride = maps.stride();
  const long cx = std::lround(root.u / stride);
  const long cy = std::lround(root.v / stride);
  if (!std::isfinite(root.u) || !std::isfinite(root.v) ||
      !maps.in_bounds(static_cast<int>(cx), static_cast<int>(cy))) {
    throw Error(ErrorCode::OutOfBounds, "root (" + std::to_string(root.u) + ", " +
                                            std::to_string(root.v) +
                                            ") lies outside the offset map");
  }
  const int x = static_cast<int>(cx);
  const int y = static_cast<int>(cy);
  const int jc = skel.joint_count();
  Pose25D pose = Pose25D::empty(jc);
  for (int k = 0; k < jc; ++k) {
    pose.valid[k] = true;
    pose.source[k] = JointSource::Offset;
    const int ch = skel.offset_channel(k);
    if (ch < 0) {
      pose.joints[k] = {root.u, root.v, 0.0};
      continue;
    }
    pose.joints[k] = {root.u + maps.offset(ch, 0, y, x),
                      root.v + maps.offset(ch, 1, y, x),
                      static_cast<double>(maps.offset(ch, 2, y, x))};
  }
  return pose;
}

Pose25D fuse_structured(const Pose25D& heatmap_pose, const Pose25D& offset_pose,
                        double threshold) {
  const int jc = offset_pose.joint_count();
  Pose25D out = Pose25D::empty(jc);
  for (int k = 0; k < jc; ++k) {
    const bool from_heatmap = k < heatmap_pose.joint_count() &&
                              heatmap_pose.valid[k] &&
                              heatmap_pose.score[k] >= threshold;
    const Point25D& src = from_heatmap ? heatmap_pose.joints[k] : offset_pose.joints[k];
    out.joints[k] = {src.u, src.v, offset_pose.joints[k].z_rel};
    out.valid[k] = offset_pose.valid[k] || from_heatmap;
    out.source[k] = from_heatmap ? JointSource::Heatmap : JointSource::Offset;
    out.score[k] = k < heatmap_pose.joint_count() && heatmap_pose.valid[k]
                       ? heatmap_pose.score[k]
                       : 0.0;
  }
  return out;
}

std::vector<Pose25D> decode_poses(const DenseMaps& maps,
                                  const SkeletonDef& skel,
                                  const DecodeConfig& cfg) {
  if (!cfg.use_heatmap && !cfg.use_offset) {
    throw Error(ErrorCode::InvalidConfig,
                "at least one of the heatmap and offset branches is required");
  }
  const PeakSet peaks = extract_peaks(maps, cfg.nms_radius_px, cfg.min_score);
  const auto heat_poses = group_by_paf(peaks, maps, skel, cfg.paf);
  const int root = skel.root_index();
  std::vector<Pose25D> out;
  out.reserve(heat_poses.size());
  for (const Pose25D& hp : heat_poses) {
    const Point25D& r = hp.joints[root];
    const Pose25D op = decode_offsets({r.u, r.v}, maps, skel);
    if (cfg.use_heatmap && cfg.use_offset) {
      out.push_back(fuse_structured(hp, op, cfg.threshold));
    } else if (cfg.use_offset) {
      Pose25D p = op;
      p.score = hp.score;
      out.push_back(std::move(p));
    } else {
      // Heatmap only: undetected joints stay invalid and collapse onto the
      // root; relative depth is still read from the offset map.
      Pose25D p = hp;
      for (int k = 0; k < p.joint_count(); ++k) {
        if (!p.valid[k]) p.joints[k] = {r.u, r.v, 0.0};
        p.joints[k].z_rel = op.joints[k].z_rel;
        p.source[k] = JointSource::Heatmap;
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

RenderConfig render_config_for(const SceneSample& scene, int stride) {
  if (stride <= 0) throw Error(ErrorCode::InvalidConfig, "stride must be positive");
  RenderConfig cfg;
  cfg.stride = stride;
  cfg.width_cells = (scene.image_width + stride - 1) / stride;
  cfg.height_cells = (scene.image_height + stride - 1) / stride;
  cfg.seed = scene.rng_seed;
  return cfg;
}

DenseMaps render_maps(const SceneSample& scene, const RenderConfig& cfg) {
  const SkeletonDef& skel = scene.skeleton;
  const int jc = skel.joint_count();
  const int lc = static_cast<int>(skel.limbs().size());
  DenseMaps maps(jc, lc, cfg.height_cells, cfg.width_cells, cfg.stride);
  const double stride = cfg.stride;
  const double two_sigma2 = 2.0 * cfg.sigma_cells * cfg.sigma_cells;
  const int reach = static_cast<int>(std::ceil(4.0 * cfg.sigma_cells));

  std::vector<int> paf_count(static_cast<std::size_t>(lc) * cfg.height_cells *
                                 cfg.width_cells,
                             0);
  auto count_at = [&](int l, int y, int x) -> int& {
    return paf_count[(static_cast<std::size_t>(l) * cfg.height_cells + y) *
                         cfg.width_cells +
                     x];
  };
  std::vector<double> owner_depth(
      static_cast<std::size_t>(cfg.height_cells) * cfg.width_cells,
      std::numeric_limits<double>::infinity());

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (const ScenePerson& person : scene.persons) {
    // Offset noise is drawn for every person and joint so the stream does
    // not depend on visibility.
    std::vector<Point25D> noise(jc);
    for (auto& n : noise) {
      n.u = cfg.offset_pixel_sigma * gauss(rng);
      n.v = cfg.offset_pixel_sigma * gauss(rng);
      n.z_rel = cfg.offset_zrel_sigma * gauss(rng);
    }

    std::vector<Pixel> px(jc);
    std::vector<bool> projectable(jc, false);
    std::vector<bool> visible(jc, false);
    for (int k = 0; k < jc; ++k) {
      if (!person.joints.valid[k] || !(person.joints.joints[k].z > 0.0)) continue;
      px[k] = project(person.joints.joints[k], scene.cam);
      projectable[k] = true;
      const double cu = px[k].u / stride;
      const double cv = px[k].v / stride;
      const bool occluded = k < static_cast<int>(person.occluded.size()) &&
                            person.occluded[k];
      visible[k] = !occluded && cu >= 0.0 && cv >= 0.0 &&
                   cu <= cfg.width_cells - 1 && cv <= cfg.height_cells - 1;
    }

    for (int k = 0; k < jc; ++k) {
      if (!visible[k]) continue;
      const double cu = px[k].u / stride;
      const double cv = px[k].v / stride;
      const int x0 = static_cast<int>(std::floor(cu));
      const int y0 = static_cast<int>(std::floor(cv));
      for (int y = y0 - reach; y <= y0 + reach + 1; ++y) {
        for (int x = x0 - reach; x <= x0 + reach + 1; ++x) {
          if (!maps.in_bounds(x, y)) continue;
          const double d2 = (x - cu) * (x - cu) + (y - cv) * (y - cv);
          const float g = static_cast<float>(std::exp(-d2 / two_sigma2));
          float& cell = maps.heat(k, y, x);
          cell = std::max(cell, g);
        }
      }
    }

    for (int l = 0; l < lc; ++l) {
      const Limb& limb = skel.limbs()[l];
      if (!visible[limb.parent] || !visible[limb.child]) continue;
      const double ax = px[limb.parent].u / stride;
      const double ay = px[limb.parent].v / stride;
      const double bx = px[limb.child].u / stride;
      const double by = px[limb.child].v / stride;
      const double len = std::hypot(bx - ax, by - ay);
      if (len < 1e-9) continue;
      const double ux = (bx - ax) / len;
      const double uy = (by - ay) / len;
      const double wdt = cfg.paf_width_cells;
      const int xmin = static_cast<int>(std::floor(std::min(ax, bx) - wdt));
      const int xmax = static_cast<int>(std::ceil(std::max(ax, bx) + wdt));
      const int ymin = static_cast<int>(std::floor(std::min(ay, by) - wdt));
      const int ymax = static_cast<int>(std::ceil(std::max(ay, by) + wdt));
      for (int y = ymin; y <= ymax; ++y) {
        for (int x = xmin; x <= xmax; ++x) {
          if (!maps.in_bounds(x, y)) continue;
          const double rx = x - ax;
          const double ry = y - ay;
          const double along = rx * ux + ry * uy;
          const double across = std::abs(-rx * uy + ry * ux);
          if (along < -wdt || along > len + wdt || across > wdt) continue;
          maps.paf(l, 0, y, x) += static_cast<float>(ux);
          maps.paf(l, 1, y, x) += static_cast<float>(uy);
          ++count_at(l, y, x);
        }
      }
    }

    const int root = skel.root_index();
    if (!projectable[root]) continue;
    const double root_z = person.joints.joints[root].z;
    const long rcx = std::lround(px[root].u / stride);
    const long rcy = std::lround(px[root].v / stride);
    const int r = cfg.offset_radius_cells;
    for (long y = rcy - r; y <= rcy + r; ++y) {
      for (long x = rcx - r; x <= rcx + r; ++x) {
        if (!maps.in_bounds(static_cast<int>(x), static_cast<int>(y))) continue;
        if ((x - rcx) * (x - rcx) + (y - rcy) * (y - rcy) > r * r) continue;
        double& owner = owner_depth[static_cast<std::size_t>(y) * cfg.width_cells + x];
        if (!(root_z < owner)) continue;
        owner = root_z;
        for (int k = 0; k < jc; ++k) {
          const int ch = skel.offset_channel(k);
          if (ch < 0) continue;
          const int ix = static_cast<int>(x);
          const int iy = static_cast<int>(y);
          if (!projectable[k]) {
            maps.offset(ch, 0, iy, ix) = 0.0f;
            maps.offset(ch, 1, iy, ix) = 0.0f;
            maps.offset(ch, 2, iy, ix) = 0.0f;
            continue;
          }
          maps.offset(ch, 0, iy, ix) =
              static_cast<float>(px[k].u - px[root].u + noise[k].u);
          maps.offset(ch, 1, iy, ix) =
              static_cast<float>(px[k].v - px[root].v + noise[k].v);
          maps.offset(ch, 2, iy, ix) = static_cast<float>(
              person.joints.joints[k].z - root_z + noise[k].z_rel);
        }
      }
    }
  }

  for (int l = 0; l < lc; ++l) {
    for (int y = 0; y < cfg.height_cells; ++y) {
      for (int x = 0; x < cfg.width_cells; ++x) {
        const int n = count_at(l, y, x);
        if (n > 1) {
          maps.paf(l, 0, y, x) /= static_cast<float>(n);
          maps.paf(l, 1, y, x) /= static_cast<float>(n);
        }
      }
    }
  }
  return maps;
}

}  // namespace geodepth
