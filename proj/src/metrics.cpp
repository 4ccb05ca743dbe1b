#include "geodepth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace geodepth {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_pixel_distance(const Pose25D& a, const Pose25D& b) {
  double sum = 0.0;
  int n = 0;
  const int jc = std::min(a.joint_count(), b.joint_count());
  for (int k = 0; k < jc; ++k) {
    if (!a.valid[k] || !b.valid[k]) continue;
    sum += std::hypot(a.joints[k].u - b.joints[k].u, a.joints[k].v - b.joints[k].v);
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::infinity() : sum / n;
}

int valid_count(const Pose3D& p) {
  return static_cast<int>(std::count(p.valid.begin(), p.valid.end(), true));
}

std::vector<bool> matched_gt(const Pairing& pairing) {
  std::vector<bool> m(pairing.gt_count, false);
  for (const auto& [g, p] : pairing.pairs) m[g] = true;
  return m;
}

template <typename JointOk>
Counts pck_counts(const Pairing& pairing, const std::vector<PersonObs>& pred,
                  const std::vector<PersonObs>& gt, const EvalConfig& cfg,
                  bool root_only, JointOk joint_ok) {
  Counts c;
  const int r = cfg.root_index;
  for (const auto& [g, p] : pairing.pairs) {
    const Pose3D& gp = gt[g].pose3d;
    const Pose3D& pp = pred[p].pose3d;
    for (int k = 0; k < gp.joint_count(); ++k) {
      if (root_only && k != r) continue;
      if (!gp.valid[k]) continue;
      ++c.total;
      if (k < pp.joint_count() && pp.valid[k] && joint_ok(gp, pp, k)) ++c.correct;
    }
  }
  if (cfg.include_unmatched) {
    const auto m = matched_gt(pairing);
    for (int g = 0; g < pairing.gt_count; ++g) {
      if (m[g]) continue;
      const Pose3D& gp = gt[g].pose3d;
      c.total += root_only ? (gp.valid[r] ? 1 : 0) : valid_count(gp);
    }
  }
  return c;
}

int ordinal(double a, double b, double band) {
  const double d = a - b;
  if (std::abs(d) < band) return 0;
  return d < 0.0 ? -1 : 1;
}

}  // namespace

double Counts::percent() const {
  return total == 0 ? kNaN : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

Pairing match_persons(const std::vector<PersonObs>& pred,
                      const std::vector<PersonObs>& gt, const EvalConfig& cfg) {
  Pairing out;
  out.gt_count = static_cast<int>(gt.size());
  out.pred_count = static_cast<int>(pred.size());
  std::vector<std::tuple<double, int, int>> candidates;
  for (int g = 0; g < out.gt_count; ++g) {
    for (int p = 0; p < out.pred_count; ++p) {
      const double d = mean_pixel_distance(gt[g].pose2d, pred[p].pose2d);
      if (d <= cfg.match_threshold) candidates.emplace_back(d, g, p);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<bool> g_used(gt.size(), false);
  std::vector<bool> p_used(pred.size(), false);
  for (const auto& [d, g, p] : candidates) {
    if (g_used[g] || p_used[p]) continue;
    g_used[g] = true;
    p_used[p] = true;
    out.pairs.emplace_back(g, p);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

Counts pck_rel_counts(const Pairing& pairing, const std::vector<PersonObs>& pred,
                      const std::vector<PersonObs>& gt, const EvalConfig& cfg) {
  const int r = cfg.root_index;
  return pck_counts(pairing, pred, gt, cfg, false,
                    [&](const Pose3D& g, const Pose3D& p, int k) {
                      if (!p.valid[r] || !g.valid[r]) return false;
                      const Point3D aligned{
                          p.joints[k].x - p.joints[r].x + g.joints[r].x,
                          p.joints[k].y - p.joints[r].y + g.joints[r].y,
                          p.joints[k].z - p.joints[r].z + g.joints[r].z};
                      return distance(aligned, g.joints[k]) <= cfg.pck_threshold;
                    });
}

Counts pck_abs_counts(const Pairing& pairing, const std::vector<PersonObs>& pred,
                      const std::vector<PersonObs>& gt, const EvalConfig& cfg) {
  return pck_counts(pairing, pred, gt, cfg, false,
                    [&](const Pose3D& g, const Pose3D& p, int k) {
                      return distance(p.joints[k], g.joints[k]) <= cfg.pck_threshold;
                    });
}

Counts pck_root_counts(const Pairing& pairing, const std::vector<PersonObs>& pred,
                       const std::vector<PersonObs>& gt, const EvalConfig& cfg) {
  return pck_counts(pairing, pred, gt, cfg, true,
                    [&](const Pose3D& g, const Pose3D& p, int k) {
                      return distance(p.joints[k], g.joints[k]) <= cfg.pck_threshold;
                    });
}

Counts pcod_counts(const Pairing& pairing, const std::vector<PersonObs>& pred,
                   const std::vector<PersonObs>& gt, const EvalConfig& cfg) {
  Counts c;
  const int r = cfg.root_index;
  const auto& m = pairing.pairs;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const double gi = gt[m[i].first].pose3d.joints[r].z;
      const double gj = gt[m[j].first].pose3d.joints[r].z;
      const double pi = pred[m[i].second].pose3d.joints[r].z;
      const double pj = pred[m[j].second].pose3d.joints[r].z;
      ++c.total;
      if (ordinal(pi, pj, cfg.pcod_tie_band) == ordinal(gi, gj, cfg.pcod_tie_band)) {
        ++c.correct;
      }
    }
  }
  return c;
}

double pck_rel(const Pairing& pairing, const std::vector<PersonObs>& pred,
               const std::vector<PersonObs>& gt, const EvalConfig& cfg) {
  return pck_rel_counts(pairing, pred, gt, cfg).percent();
}
double pck_abs(const Pairing& pairing, const std::vector<PersonObs>& pred,
               const std::vector<PersonObs>& gt, const EvalConfig& cfg) {
  return pck_abs_counts(pairing, pred, gt, cfg).percent();
}
double pck_root(const Pairing& pairing, const std::vector<PersonObs>& pred,
                const std::vector<PersonObs>& gt, const EvalConfig& cfg) {
  return pck_root_counts(pairing, pred, gt, cfg).percent();
}
double pcod(const Pairing& pairing, const std::vector<PersonObs>& pred,
            const std::vector<PersonObs>& gt, const EvalConfig& cfg) {
  return pcod_counts(pairing, pred, gt, cfg).percent();
}

namespace {

RootError root_error_sum(const Pairing& pairing, const std::vector<PersonObs>& pred,
                         const std::vector<PersonObs>& gt, int r) {
  RootError e;
  for (const auto& [g, p] : pairing.pairs) {
    const Point3D& a = pred[p].pose3d.joints[r];
    const Point3D& b = gt[g].pose3d.joints[r];
    e.x += 1000.0 * std::abs(a.x - b.x);
    e.y += 1000.0 * std::abs(a.y - b.y);
    e.z += 1000.0 * std::abs(a.z - b.z);
  }
  return e;
}

}  // namespace

RootError mrpe(const Pairing& pairing, const std::vector<PersonObs>& pred,
               const std::vector<PersonObs>& gt, const EvalConfig& cfg) {
  if (pairing.pairs.empty()) return {kNaN, kNaN, kNaN};
  RootError e = root_error_sum(pairing, pred, gt, cfg.root_index);
  const double n = static_cast<double>(pairing.pairs.size());
  return {e.x / n, e.y / n, e.z / n};
}

FrameEval evaluate_frame(std::int64_t frame_id, const std::vector<PersonObs>& pred,
                         const std::vector<PersonObs>& gt, const EvalConfig& cfg) {
  const Pairing pairing = match_persons(pred, gt, cfg);
  FrameEval f;
  f.frame_id = frame_id;
  f.rel = pck_rel_counts(pairing, pred, gt, cfg);
  f.abs = pck_abs_counts(pairing, pred, gt, cfg);
  f.root = pck_root_counts(pairing, pred, gt, cfg);
  f.ordinal = pcod_counts(pairing, pred, gt, cfg);
  f.root_error_sum = root_error_sum(pairing, pred, gt, cfg.root_index);
  f.matched_count = static_cast<int>(pairing.pairs.size());
  f.gt_count = pairing.gt_count;
  return f;
}

EvalRow summarize(const FrameEval& f) {
  EvalRow row;
  row.frame_id = f.frame_id;
  row.pck_rel = f.rel.percent();
  row.pck_abs = f.abs.percent();
  row.pck_root = f.root.percent();
  row.pcod = f.ordinal.percent();
  const double n = f.matched_count;
  row.mrpe_x = n > 0 ? f.root_error_sum.x / n : kNaN;
  row.mrpe_y = n > 0 ? f.root_error_sum.y / n : kNaN;
  row.mrpe_z = n > 0 ? f.root_error_sum.z / n : kNaN;
  row.matched_count = f.matched_count;
  row.gt_count = f.gt_count;
  return row;
}

EvalReport make_report(std::vector<FrameEval> frames, const EvalConfig& cfg) {
  std::stable_sort(frames.begin(), frames.end(),
                   [](const FrameEval& a, const FrameEval& b) { return a.frame_id < b.frame_id; });
  EvalReport report;
  report.include_unmatched = cfg.include_unmatched;
  FrameEval total;
  for (const auto& f : frames) {
    report.frames.push_back(summarize(f));
    total.rel += f.rel;
    total.abs += f.abs;
    total.root += f.root;
    total.ordinal += f.ordinal;
    total.root_error_sum.x += f.root_error_sum.x;
    total.root_error_sum.y += f.root_error_sum.y;
    total.root_error_sum.z += f.root_error_sum.z;
    total.matched_count += f.matched_count;
    total.gt_count += f.gt_count;
  }
  report.summary = summarize(total);
  report.summary.frame_id = -1;
  return report;
}

}  // namespace geodepth
