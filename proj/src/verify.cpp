#include "geodepth/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "geodepth/error.hpp"

namespace geodepth {

namespace {

// Extended precision: the objective is flat at a no-real-root minimum, so
// double rounding would blur its location well beyond 1e-6 m.
long double torso_gap(const TorsoCase& c, const SkeletonDef& skel, long double z) {
  const Point25D& r = c.pose.joints[skel.root_index()];
  const Point25D& n = c.pose.joints[skel.neck_index()];
  const long double fx = c.cam.fx, fy = c.cam.fy, cx = c.cam.cx, cy = c.cam.cy;
  const long double zn = z + n.z_rel;
  const long double dx = zn * (n.u - cx) / fx - z * (r.u - cx) / fx;
  const long double dy = zn * (n.v - cy) / fy - z * (r.v - cy) / fy;
  const long double dz = n.z_rel;
  const long double d = std::sqrt(dx * dx + dy * dy + dz * dz) - c.omega;
  return d * d;
}

template <typename F>
long double golden(F f, long double lo, long double hi) {
  const long double g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double a = lo, b = hi;
  long double x1 = b - g * (b - a), x2 = a + g * (b - a);
  long double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 200; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5L * (a + b);
}

// Random root/neck pixels whose distance minimizer lies in a usable range;
// `shrink` maps the minimum distance to the torso length.
template <typename Shrink>
std::vector<TorsoCase> constructed_cases(int count, std::uint64_t seed, Shrink shrink) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1280), v(0, 720), zr(-1.0, 1.0);
  const CameraIntrinsics cam{1000, 1000, 640, 360};
  const SkeletonDef& skel = SkeletonDef::mupots15();
  const int r = skel.root_index();
  const int n = skel.neck_index();
  std::vector<TorsoCase> out;
  while (static_cast<int>(out.size()) < count) {
    TorsoCase c;
    c.cam = cam;
    c.pose = Pose25D::empty(skel.joint_count());
    c.pose.joints[r] = {u(rng), v(rng), 0.0};
    c.pose.joints[n] = {u(rng), v(rng), zr(rng)};
    c.pose.valid[r] = c.pose.valid[n] = true;
    const auto& a = c.pose.joints[r];
    const auto& b = c.pose.joints[n];
    if (std::hypot(a.u - b.u, a.v - b.v) < 5.0) continue;
    // With omega = 0 the quadratic is the squared distance itself.
    const QuadCoeffs q = quad_coeffs(c.pose, cam, TorsoPrior(1.0), skel);
    const double z0 = -q.b / (2.0 * q.a);
    const double dmin2 = q.eval(z0) + 1.0;
    if (!(z0 > 0.5 && z0 < 45.0) || !(dmin2 > 1e-6)) continue;
    c.omega = shrink(std::sqrt(dmin2), rng);
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<TorsoCase> scene_torso_cases(int count, std::uint64_t seed,
                                         const NoiseModel& noise) {
  std::vector<TorsoCase> out;
  const SceneConfig cfg;
  for (std::uint64_t frame = 0; static_cast<int>(out.size()) < count; ++frame) {
    const SceneSample scene = generate_scene(2, derive_seed(seed, 2 * frame), cfg);
    const Observation obs = observe(scene, noise, derive_seed(seed, 2 * frame + 1));
    for (std::size_t i = 0; i < obs.poses.size() && static_cast<int>(out.size()) < count; ++i) {
      out.push_back({obs.poses[i], scene.cam, obs.omega[i], obs.z_root[i]});
    }
  }
  return out;
}

std::vector<TorsoCase> no_real_root_cases(int count, std::uint64_t seed) {
  return constructed_cases(count, seed, [](double dmin, std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.2, 0.9)(rng) * dmin;
  });
}

std::vector<TorsoCase> tangent_cases(int count, std::uint64_t seed) {
  return constructed_cases(count, seed, [](double dmin, std::mt19937_64&) { return dmin; });
}

double numeric_root_depth(const TorsoCase& c, const SkeletonDef& skel, double lo,
                          double hi, int grid) {
  const auto f = [&](long double z) { return torso_gap(c, skel, z); };
  const long double step = (static_cast<long double>(hi) - lo) / grid;
  std::vector<long double> values(grid + 1);
  for (int i = 0; i <= grid; ++i) values[i] = f(lo + i * step);
  std::vector<std::pair<long double, long double>> minima;  // (z, f)
  for (int i = 0; i <= grid; ++i) {
    const bool left = i == 0 || values[i] <= values[i - 1];
    const bool right = i == grid || values[i] <= values[i + 1];
    if (!left || !right) continue;
    const long double z = golden(f, lo + std::max(0, i - 1) * step,
                                 lo + std::min(grid, i + 1) * step);
    minima.emplace_back(z, f(z));
  }
  long double best = minima.front().second;
  for (const auto& m : minima) best = std::min(best, m.second);
  // Both roots of a two-root case reach zero; take the larger depth.
  const long double tol = 1e-20L + 1e-9L * best;
  long double z = -std::numeric_limits<long double>::infinity();
  for (const auto& m : minima) {
    if (m.second <= best + tol) z = std::max(z, m.first);
  }
  return static_cast<double>(z);
}

OracleSummary closed_form_vs_argmin(const std::vector<TorsoCase>& cases,
                                    const SkeletonDef& skel) {
  OracleSummary s;
  for (const TorsoCase& c : cases) {
    GeoDepthResult r;
    try {
      r = geo_depth(c.pose, c.cam, TorsoPrior(c.omega), skel);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateGeometry) throw;
      ++s.degenerate;
      continue;
    }
    if (r.branch == RootBranch::NoRealRoot) ++s.no_real_root;
    ++s.checked;
    s.max_deviation = std::max(s.max_deviation, std::abs(r.z - numeric_root_depth(c, skel)));
  }
  return s;
}

double GradcheckSummary::max_error() const {
  return *std::max_element(worst.begin(), worst.end());
}

GradcheckSummary gradcheck(const std::vector<TorsoCase>& cases, const SkeletonDef& skel,
                           double h, double abs_floor, double near_tangent) {
  GradcheckSummary s;
  const int r = skel.root_index();
  const int n = skel.neck_index();
  for (const TorsoCase& c : cases) {
    const QuadCoeffs q = quad_coeffs(c.pose, c.cam, TorsoPrior(c.omega), skel);
    if (!(std::sqrt(std::max(0.0, q.discriminant())) >= near_tangent)) {
      ++s.skipped_tangent;
      continue;
    }
    GeoGradient g;
    try {
      g = geo_depth_grad(c.pose, c.cam, TorsoPrior(c.omega), skel);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TangentSingularity) throw;
      ++s.skipped_tangent;
      continue;
    }
    const std::array<double, 6> analytic = {g.du_root, g.dv_root, g.du_neck,
                                            g.dv_neck, g.dz_neck, g.domega};
    for (int p = 0; p < 6; ++p) {
      auto at = [&](double delta) {
        TorsoCase t = c;
        switch (p) {
          case 0: t.pose.joints[r].u += delta; break;
          case 1: t.pose.joints[r].v += delta; break;
          case 2: t.pose.joints[n].u += delta; break;
          case 3: t.pose.joints[n].v += delta; break;
          case 4: t.pose.joints[n].z_rel += delta; break;
          default: t.omega += delta; break;
        }
        return geo_depth(t.pose, t.cam, TorsoPrior(t.omega), skel).z;
      };
      const double fd = (at(h) - at(-h)) / (2.0 * h);
      const double scale = std::max(std::abs(fd), std::abs(analytic[p]));
      const double err = scale < abs_floor ? std::abs(fd - analytic[p])
                                           : std::abs(fd - analytic[p]) / scale;
      s.worst[p] = std::max(s.worst[p], err);
    }
    ++s.checked;
  }
  return s;
}

}  // namespace geodepth
