#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

TorsoInstance instance_from_pose(const geodepth::Pose25D& pose,
                                 const geodepth::SkeletonDef& skel,
                                 const geodepth::CameraIntrinsics& cam,
                                 double omega) {
  const auto& r = pose.joints[skel.root_index()];
  const auto& n = pose.joints[skel.neck_index()];
  return {r.u, r.v, n.u, n.v, n.z_rel, omega, cam};
}

long double torso_distance(const TorsoInstance& t, long double z) {
  const long double fx = t.cam.fx, fy = t.cam.fy, cx = t.cam.cx, cy = t.cam.cy;
  const long double zn = z + t.z_neck;
  const long double rx = z * (t.u_root - cx) / fx;
  const long double ry = z * (t.v_root - cy) / fy;
  const long double nx = zn * (t.u_neck - cx) / fx;
  const long double ny = zn * (t.v_neck - cy) / fy;
  const long double dx = nx - rx, dy = ny - ry, dz = zn - z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

long double torso_objective(const TorsoInstance& t, long double z) {
  const long double e = torso_distance(t, z) - t.omega;
  return e * e;
}

long double golden_section(const std::function<long double(long double)>& f,
                           long double lo, long double hi, int iterations) {
  const long double inv_phi = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double a = lo, b = hi;
  long double c = b - inv_phi * (b - a);
  long double d = a + inv_phi * (b - a);
  long double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && b - a > 1e-17L * std::max(1.0L, std::abs(b)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0L;
}

ArgminResult numeric_argmin(const TorsoInstance& t, double lo, double hi, int grid) {
  auto f = [&](long double z) { return torso_objective(t, z); };
  std::vector<long double> zs(grid + 1), fs(grid + 1);
  for (int i = 0; i <= grid; ++i) {
    zs[i] = lo + (hi - lo) * static_cast<long double>(i) / grid;
    fs[i] = f(zs[i]);
  }
  std::vector<std::pair<long double, long double>> minima;  // (z, f)
  for (int i = 0; i <= grid; ++i) {
    const bool left = i == 0 || fs[i] <= fs[i - 1];
    const bool right = i == grid || fs[i] <= fs[i + 1];
    if (!left || !right) continue;
    const long double a = zs[std::max(0, i - 1)];
    const long double b = zs[std::min(grid, i + 1)];
    const long double z = golden_section(f, a, b);
    minima.emplace_back(z, f(z));
  }
  long double best = std::numeric_limits<long double>::infinity();
  for (const auto& m : minima) best = std::min(best, m.second);
  ArgminResult out;
  out.objective = static_cast<double>(best);
  long double zbest = -1;
  for (const auto& m : minima) {
    if (m.second <= best * (1.0L + 1e-9L) + 1e-24L) {
      ++out.global_minima;
      zbest = std::max(zbest, m.first);
    }
  }
  out.z = static_cast<double>(zbest);
  return out;
}

double min_distance_depth(const TorsoInstance& t, double lo, double hi) {
  return static_cast<double>(
      golden_section([&](long double z) { return torso_distance(t, z); }, lo, hi));
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

namespace {

double pixel_cost(const geodepth::PersonObs& a, const geodepth::PersonObs& b) {
  double s = 0;
  int n = 0;
  for (int k = 0; k < a.pose2d.joint_count(); ++k) {
    if (!a.pose2d.valid[k] || !b.pose2d.valid[k]) continue;
    const double du = a.pose2d.joints[k].u - b.pose2d.joints[k].u;
    const double dv = a.pose2d.joints[k].v - b.pose2d.joints[k].v;
    s += std::sqrt(du * du + dv * dv);
    ++n;
  }
  return n ? s / n : std::numeric_limits<double>::infinity();
}

double dist3(const geodepth::Point3D& a, const geodepth::Point3D& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

int ord(double a, double b, double band) {
  if (std::abs(a - b) < band) return 0;
  return a < b ? -1 : 1;
}

}  // namespace

std::vector<std::pair<int, int>> brute_force_matching(
    const std::vector<geodepth::PersonObs>& pred,
    const std::vector<geodepth::PersonObs>& gt, double threshold) {
  // Enumerate injective maps gt -> pred-or-none, maximizing the number of
  // pairs first and minimizing total cost second.
  const int ng = static_cast<int>(gt.size());
  const int np = static_cast<int>(pred.size());
  std::vector<int> assign(ng, -1), best;
  int best_pairs = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<bool> used(np, false);
  std::function<void(int, int, double)> rec = [&](int g, int pairs, double cost) {
    if (g == ng) {
      if (pairs > best_pairs || (pairs == best_pairs && cost < best_cost)) {
        best_pairs = pairs;
        best_cost = cost;
        best = assign;
      }
      return;
    }
    assign[g] = -1;
    rec(g + 1, pairs, cost);
    for (int p = 0; p < np; ++p) {
      if (used[p]) continue;
      const double c = pixel_cost(gt[g], pred[p]);
      if (!(c <= threshold)) continue;
      used[p] = true;
      assign[g] = p;
      rec(g + 1, pairs + 1, cost + c);
      used[p] = false;
      assign[g] = -1;
    }
  };
  rec(0, 0, 0.0);
  std::vector<std::pair<int, int>> out;
  for (int g = 0; g < ng; ++g) {
    if (best[g] >= 0) out.emplace_back(g, best[g]);
  }
  return out;
}

BruteCounts brute_force_metrics(const std::vector<std::pair<int, int>>& pairs,
                                const std::vector<geodepth::PersonObs>& pred,
                                const std::vector<geodepth::PersonObs>& gt,
                                double threshold, double band, int root,
                                bool include_unmatched) {
  BruteCounts c;
  std::vector<bool> matched(gt.size(), false);
  for (const auto& [g, p] : pairs) {
    matched[g] = true;
    const auto& G = gt[g].pose3d;
    const auto& P = pred[p].pose3d;
    for (int k = 0; k < G.joint_count(); ++k) {
      if (!G.valid[k]) continue;
      const bool pv = P.valid[k];
      c.abs_total++;
      c.rel_total++;
      if (pv && dist3(P.joints[k], G.joints[k]) <= threshold) c.abs_correct++;
      if (pv && P.valid[root]) {
        geodepth::Point3D q{P.joints[k].x + (G.joints[root].x - P.joints[root].x),
                            P.joints[k].y + (G.joints[root].y - P.joints[root].y),
                            P.joints[k].z + (G.joints[root].z - P.joints[root].z)};
        if (dist3(q, G.joints[k]) <= threshold) c.rel_correct++;
      }
      if (k == root) {
        c.root_total++;
        if (pv && dist3(P.joints[k], G.joints[k]) <= threshold) c.root_correct++;
      }
    }
    c.mrpe_x += 1000.0 * std::abs(P.joints[root].x - G.joints[root].x);
    c.mrpe_y += 1000.0 * std::abs(P.joints[root].y - G.joints[root].y);
    c.mrpe_z += 1000.0 * std::abs(P.joints[root].z - G.joints[root].z);
    c.matched++;
  }
  if (include_unmatched) {
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (matched[g]) continue;
      for (int k = 0; k < gt[g].pose3d.joint_count(); ++k) {
        if (!gt[g].pose3d.valid[k]) continue;
        c.abs_total++;
        c.rel_total++;
        if (k == root) c.root_total++;
      }
    }
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      if (j <= i) continue;
      const double gi = gt[pairs[i].first].pose3d.joints[root].z;
      const double gj = gt[pairs[j].first].pose3d.joints[root].z;
      const double pi = pred[pairs[i].second].pose3d.joints[root].z;
      const double pj = pred[pairs[j].second].pose3d.joints[root].z;
      c.pcod_total++;
      if (ord(gi, gj, band) == ord(pi, pj, band)) c.pcod_correct++;
    }
  }
  return c;
}

}  // namespace oracle
