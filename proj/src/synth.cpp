#include "geodepth/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "geodepth/error.hpp"
#include "geodepth/geo_depth.hpp"

namespace geodepth {

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

Vec3 mul(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

Mat3 rot_x(double t) {
  const double c = std::cos(t), s = std::sin(t);
  return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
}
Mat3 rot_y(double t) {
  const double c = std::cos(t), s = std::sin(t);
  return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
}
Mat3 rot_z(double t) {
  const double c = std::cos(t), s = std::sin(t);
  return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

Vec3 normalized(const Vec3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

double deg(double d) { return d * std::numbers::pi / 180.0; }

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double jitter(double j) { return uniform(1.0 - j, 1.0 + j); }

 private:
  std::mt19937_64 rng_;
};

// Bone lengths in meters, indexed like the child joint of each limb of the
// default skeleton; the torso entry is replaced by the sampled omega.
struct BoneSpec {
  int parent;
  int child;
  double length;
};

constexpr std::array<BoneSpec, 14> kBones{{
    {14, 1, 0.0},    // torso
    {1, 0, 0.25},    // head
    {1, 2, 0.18},    // right clavicle
    {2, 3, 0.30},    // right upper arm
    {3, 4, 0.27},    // right forearm
    {1, 5, 0.18},
    {5, 6, 0.30},
    {6, 7, 0.27},
    {14, 8, 0.11},   // right pelvis
    {8, 9, 0.44},    // right thigh
    {9, 10, 0.42},   // right shin
    {14, 11, 0.11},
    {11, 12, 0.44},
    {12, 13, 0.42},
}};

// Body frame: x to the person's left in the image, y down, z away from the
// camera. Returns joint positions relative to the pelvis.
std::vector<Vec3> sample_body(Sampler& s, double omega, double jitter) {
  std::vector<Vec3> joints(15, Vec3{0, 0, 0});
  const Vec3 up{0, -1, 0};
  const Vec3 down{0, 1, 0};
  auto tilt = [&](double max_deg) {
    return mul(rot_z(deg(s.uniform(-max_deg, max_deg))),
               rot_x(deg(s.uniform(-max_deg, max_deg))));
  };
  std::array<Vec3, 15> dir{};
  dir[1] = normalized(mul(tilt(12.0), up));
  dir[0] = normalized(mul(tilt(20.0), up));
  dir[2] = normalized(mul(tilt(10.0), Vec3{-1, 0, 0}));
  dir[5] = normalized(mul(tilt(10.0), Vec3{1, 0, 0}));
  dir[8] = normalized(mul(tilt(8.0), Vec3{-1, 0.15, 0}));
  dir[11] = normalized(mul(tilt(8.0), Vec3{1, 0.15, 0}));
  for (int side : {-1, 1}) {
    const int elbow = side < 0 ? 3 : 6;
    const int wrist = side < 0 ? 4 : 7;
    const int knee = side < 0 ? 9 : 12;
    const int ankle = side < 0 ? 10 : 13;
    const Mat3 abduct = rot_z(side * deg(s.uniform(5.0, 75.0)));
    const Mat3 flex = rot_x(deg(s.uniform(-40.0, 50.0)));
    dir[elbow] = normalized(mul(mul(abduct, flex), down));
    const Mat3 bend = rot_x(deg(s.uniform(-60.0, 10.0)));
    dir[wrist] = normalized(mul(mul(abduct, bend), dir[elbow]));
    dir[knee] = normalized(mul(tilt(15.0), down));
    dir[ankle] = normalized(mul(tilt(10.0), dir[knee]));
  }
  for (const BoneSpec& bone : kBones) {
    const double len = bone.child == 1 ? omega : bone.length * s.jitter(jitter);
    joints[bone.child] = joints[bone.parent] + len * dir[bone.child];
  }
  return joints;
}

struct Box {
  double u0, v0, u1, v1;
  bool intersects(const Box& o) const {
    return u0 < o.u1 && o.u0 < u1 && v0 < o.v1 && o.v0 < v1;
  }
};

bool uses_default_layout(const SkeletonDef& skel) {
  return skel == SkeletonDef::mupots15();
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void NoiseModel::validate() const {
  if (pixel_sigma < 0.0 || zrel_sigma < 0.0 || omega_error < 0.0 ||
      occlusion_rate < 0.0 || occlusion_rate > 1.0) {
    throw Error(ErrorCode::InvalidConfig,
                "noise parameters must be non-negative and occlusion_rate in [0, 1]");
  }
}

SceneSample generate_scene(int n_persons, std::uint64_t seed,
                           const SceneConfig& cfg, std::int64_t frame_id) {
  if (n_persons < 0) throw Error(ErrorCode::InvalidConfig, "n_persons must be >= 0");
  cfg.cam.validate();
  if (!(cfg.depth_min > 0.0) || cfg.depth_max < cfg.depth_min) {
    throw Error(ErrorCode::InvalidConfig, "invalid depth range");
  }
  SceneSample scene;
  scene.cam = cfg.cam;
  scene.image_width = cfg.image_width;
  scene.image_height = cfg.image_height;
  scene.frame_id = frame_id;
  scene.rng_seed = seed;
  if (!uses_default_layout(scene.skeleton)) {
    throw Error(ErrorCode::InvalidConfig, "scene generator needs the 15-joint layout");
  }

  Sampler s(seed);
  std::vector<Box> boxes;
  const int jc = scene.skeleton.joint_count();
  const int root = scene.skeleton.root_index();
  for (int p = 0; p < n_persons; ++p) {
    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_attempts && !placed; ++attempt) {
      const double omega = s.uniform(cfg.torso_min, cfg.torso_max);
      const auto body = sample_body(s, omega, cfg.limb_jitter);
      const Mat3 rot = mul(rot_y(s.uniform(-cfg.max_yaw_rad, cfg.max_yaw_rad)),
                           mul(rot_x(deg(s.uniform(-8.0, 8.0))),
                               rot_z(deg(s.uniform(-8.0, 8.0)))));
      const double z_root = s.uniform(cfg.depth_min, cfg.depth_max);
      const double u_root = s.uniform(cfg.root_margin_px, cfg.image_width - cfg.root_margin_px);
      const double v_root = s.uniform(cfg.root_margin_px, cfg.image_height - cfg.root_margin_px);
      const Vec3 origin{z_root * (u_root - cfg.cam.cx) / cfg.cam.fx,
                        z_root * (v_root - cfg.cam.cy) / cfg.cam.fy, z_root};

      ScenePerson person;
      person.omega = omega;
      person.joints = Pose3D::empty(jc);
      person.occluded.assign(jc, false);
      bool ok = true;
      Box box{1e300, 1e300, -1e300, -1e300};
      for (int k = 0; k < jc; ++k) {
        const Vec3 w = k == root ? origin : origin + mul(rot, body[k]);
        person.joints.joints[k] = {w[0], w[1], w[2]};
        person.joints.valid[k] = true;
        if (!(w[2] > 0.1)) {
          ok = false;
          break;
        }
        const Pixel px = project(person.joints.joints[k], cfg.cam);
        box.u0 = std::min(box.u0, px.u);
        box.v0 = std::min(box.v0, px.v);
        box.u1 = std::max(box.u1, px.u);
        box.v1 = std::max(box.v1, px.v);
        if (cfg.fully_visible &&
            (px.u < cfg.root_margin_px || px.v < cfg.root_margin_px ||
             px.u > cfg.image_width - cfg.root_margin_px ||
             px.v > cfg.image_height - cfg.root_margin_px)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const double pad = cfg.box_padding_px;
      Box padded{box.u0 - pad, box.v0 - pad, box.u1 + pad, box.v1 + pad};
      if (cfg.non_overlapping &&
          std::any_of(boxes.begin(), boxes.end(),
                      [&](const Box& b) { return b.intersects(padded); })) {
        continue;
      }
      boxes.push_back(padded);
      scene.persons.push_back(std::move(person));
      placed = true;
    }
    if (!placed) {
      throw Error(ErrorCode::PlacementFailure,
                  "could not place person " + std::to_string(p) + " after " +
                      std::to_string(cfg.max_attempts) + " attempts");
    }
  }
  return scene;
}

SceneSample with_occlusion(SceneSample scene, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "occlusion rate must be in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution hide(rate);
  const int root = scene.skeleton.root_index();
  for (auto& person : scene.persons) {
    person.occluded.resize(person.joints.joint_count(), false);
    for (int k = 0; k < person.joints.joint_count(); ++k) {
      const bool h = hide(rng);
      if (k != root && h) person.occluded[k] = true;
    }
  }
  return scene;
}

Observation observe(const SceneSample& scene, const NoiseModel& noise,
                    std::uint64_t seed) {
  noise.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution hide(noise.occlusion_rate);
  const int root = scene.skeleton.root_index();
  Observation obs;
  for (const ScenePerson& person : scene.persons) {
    const int jc = person.joints.joint_count();
    Pose25D pose = Pose25D::empty(jc);
    std::vector<bool> occluded(jc, false);
    const double z_root = person.joints.joints[root].z;
    for (int k = 0; k < jc; ++k) {
      const double nu = gauss(rng);
      const double nv = gauss(rng);
      const double nz = gauss(rng);
      const bool h = hide(rng);
      const Point3D& p = person.joints.joints[k];
      if (!person.joints.valid[k] || !(p.z > 0.0)) continue;
      const Pixel px = project(p, scene.cam);
      pose.joints[k] = {px.u + noise.pixel_sigma * nu, px.v + noise.pixel_sigma * nv,
                        k == root ? 0.0 : p.z - z_root + noise.zrel_sigma * nz};
      pose.valid[k] = true;
      pose.score[k] = 1.0;
      const bool flagged = k < static_cast<int>(person.occluded.size()) && person.occluded[k];
      occluded[k] = k != root && (h || flagged);
    }
    const double factor = 1.0 + noise.omega_error * gauss(rng);
    obs.poses.push_back(std::move(pose));
    obs.z_root.push_back(z_root);
    obs.omega.push_back(person.omega * std::max(factor, 1e-3));
    obs.occluded.push_back(std::move(occluded));
  }
  return obs;
}

DepthEstimate RegressionOracle::sample(double z_true, std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> rel(rel_sigma_min, rel_sigma_max);
  std::uniform_real_distribution<double> centered(-0.5, 0.5);
  const double sigma = std::max(rel(rng) * z_true, sigma_floor);
  const double reported = honest ? sigma : std::max(rel(rng) * z_true, sigma_floor);
  const double lambda = sigma / std::numbers::sqrt2;
  double u = centered(rng);
  while (std::abs(u) >= 0.5) u = centered(rng);
  const double noise = -lambda * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
  return {z_true + noise, reported, true};
}

double propagate_geo_sigma(const Pose25D& pose, const CameraIntrinsics& cam,
                           const TorsoPrior& omega, const SkeletonDef& skel,
                           double root_pixel_sigma, double neck_pixel_sigma,
                           double zrel_sigma, double omega_rel_error) {
  GeoGradient g;
  try {
    g = geo_depth_grad(pose, cam, omega, skel);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
  const double var =
      (g.du_root * g.du_root + g.dv_root * g.dv_root) * root_pixel_sigma * root_pixel_sigma +
      (g.du_neck * g.du_neck + g.dv_neck * g.dv_neck) * neck_pixel_sigma * neck_pixel_sigma +
      g.dz_neck * g.dz_neck * zrel_sigma * zrel_sigma +
      std::pow(g.domega * omega.omega * omega_rel_error, 2);
  return std::sqrt(var);
}

std::vector<FusionSample> fusion_benchmark(const FusionBenchConfig& cfg,
                                           std::uint64_t seed) {
  std::vector<FusionSample> out;
  out.reserve(cfg.samples);
  std::mt19937_64 reg_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const SkeletonDef& skel = SkeletonDef::mupots15();
  std::uint64_t frame = 0;
  while (static_cast<int>(out.size()) < cfg.samples) {
    const std::uint64_t scene_seed = derive_seed(seed, frame);
    const SceneSample scene = generate_scene(cfg.persons_per_scene, scene_seed,
                                             cfg.scene, static_cast<std::int64_t>(frame));
    ++frame;
    const Observation obs = observe(scene, cfg.noise, derive_seed(scene_seed, 1));
    for (std::size_t p = 0; p < obs.poses.size() && static_cast<int>(out.size()) < cfg.samples; ++p) {
      const TorsoPrior omega(obs.omega[p]);
      GeoDepthResult geo;
      try {
        geo = geo_depth(obs.poses[p], scene.cam, omega, skel);
      } catch (const Error&) {
        continue;
      }
      if (!geo.physical() || geo.branch == RootBranch::NoRealRoot) continue;
      const double sigma_geo = propagate_geo_sigma(
          obs.poses[p], scene.cam, omega, skel, cfg.noise.pixel_sigma,
          cfg.noise.pixel_sigma, cfg.noise.zrel_sigma, cfg.noise.omega_error);
      if (!std::isfinite(sigma_geo)) continue;
      FusionSample s;
      s.z_true = obs.z_root[p];
      s.geo = {geo.z, std::max(sigma_geo, cfg.reg.sigma_floor), true};
      s.reg = cfg.reg.sample(s.z_true, reg_rng);
      s.fused = fuse(s.reg, s.geo);
      out.push_back(s);
    }
  }
  return out;
}

FusionBenchSummary summarize(const std::vector<FusionSample>& samples) {
  FusionBenchSummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  for (const auto& x : samples) {
    s.mean_abs_reg += std::abs(x.reg.z - x.z_true);
    s.mean_abs_geo += std::abs(x.geo.z - x.z_true);
    s.mean_abs_fused += std::abs(x.fused.z - x.z_true);
  }
  const double n = static_cast<double>(samples.size());
  s.mean_abs_reg /= n;
  s.mean_abs_geo /= n;
  s.mean_abs_fused /= n;
  return s;
}

}  // namespace geodepth
