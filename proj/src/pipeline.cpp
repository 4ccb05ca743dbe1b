#include "geodepth/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "geodepth/error.hpp"

namespace geodepth {

namespace {

constexpr double kUnusableSigma = 1e6;

int nearest_person(const Point25D& root, const std::vector<PersonObs>& gt, int r) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int g = 0; g < static_cast<int>(gt.size()); ++g) {
    if (!gt[g].pose2d.valid[r]) continue;
    const auto& q = gt[g].pose2d.joints[r];
    const double d = std::hypot(q.u - root.u, q.v - root.v);
    if (d < best_d) {
      best_d = d;
      best = g;
    }
  }
  return best;
}

Pose3D lift_valid(const Pose25D& pose, double z_root, const CameraIntrinsics& cam) {
  Pose3D out = Pose3D::empty(pose.joint_count());
  for (int k = 0; k < pose.joint_count(); ++k) {
    if (!pose.valid[k] || !(z_root + pose.joints[k].z_rel > 0.0)) continue;
    out.joints[k] = back_project(pose.joints[k], z_root, cam);
    out.valid[k] = true;
  }
  return out;
}

}  // namespace

std::vector<PersonObs> ground_truth_obs(const SceneSample& scene) {
  std::vector<PersonObs> out;
  for (const ScenePerson& person : scene.persons) {
    PersonObs obs;
    obs.pose3d = person.joints;
    obs.pose2d = Pose25D::empty(person.joints.joint_count());
    const int r = scene.skeleton.root_index();
    for (int k = 0; k < person.joints.joint_count(); ++k) {
      const Point3D& p = person.joints.joints[k];
      if (!person.joints.valid[k] || !(p.z > 0.0)) continue;
      const Pixel px = project(p, scene.cam);
      obs.pose2d.joints[k] = {px.u, px.v, p.z - person.joints.joints[r].z};
      obs.pose2d.valid[k] = true;
    }
    out.push_back(std::move(obs));
  }
  return out;
}

std::vector<EstimatedPerson> estimate_persons(const std::vector<Pose25D>& poses,
                                              const SceneSample& scene,
                                              const NoiseModel& noise,
                                              const PipelineConfig& cfg,
                                              std::uint64_t seed) {
  if (!cfg.use_geo && !cfg.use_reg) {
    throw Error(ErrorCode::InvalidConfig, "depth output needs the geometric or regression branch");
  }
  const SkeletonDef& skel = scene.skeleton;
  const int r = skel.root_index();
  const int n = skel.neck_index();
  const auto gt = ground_truth_obs(scene);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<EstimatedPerson> out;
  for (const Pose25D& pose : poses) {
    EstimatedPerson est;
    est.pose25d = pose;
    est.gt_index = nearest_person(pose.joints[r], gt, r);
    // Draw unconditionally so the random stream does not depend on toggles.
    const double omega_noise = gauss(rng);
    const DepthEstimate reg_draw =
        est.gt_index >= 0 ? cfg.reg.sample(scene.persons[est.gt_index].joints.joints[r].z, rng)
                          : DepthEstimate{0.0, 1.0, false};

    if (cfg.use_geo && pose.valid[r] && pose.valid[n]) {
      double omega = cfg.omega_default;
      if (cfg.known_omega && est.gt_index >= 0) {
        omega = scene.persons[est.gt_index].omega *
                std::max(1.0 + noise.omega_error * omega_noise, 1e-3);
      }
      const TorsoPrior prior(omega);
      try {
        const GeoDepthResult geo = geo_depth(pose, scene.cam, prior, skel);
        if (geo.physical()) {
          auto px_sigma = [&](int k) {
            return pose.source[k] == JointSource::Heatmap ? cfg.heatmap_pixel_sigma
                                                          : noise.pixel_sigma;
          };
          const double omega_err = cfg.known_omega ? noise.omega_error : 0.0;
          double sigma = propagate_geo_sigma(pose, scene.cam, prior, skel, px_sigma(r),
                                             px_sigma(n), noise.zrel_sigma, omega_err);
          if (!std::isfinite(sigma)) sigma = kUnusableSigma;
          est.geo = DepthEstimate{geo.z, std::max(sigma, cfg.sigma_floor), true};
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateGeometry) throw;
      }
    }
    if (cfg.use_reg && reg_draw.valid) est.reg = reg_draw;

    if (est.geo && est.reg) {
      if (cfg.use_fusion) {
        est.depth = fuse(*est.reg, *est.geo);
      } else {
        est.depth = {0.5 * (est.reg->z + est.geo->z), 0.5 * (est.reg->sigma + est.geo->sigma), true};
      }
    } else if (est.geo) {
      est.depth = *est.geo;
    } else if (est.reg) {
      est.depth = *est.reg;
    } else {
      continue;
    }
    est.pose3d = lift_valid(pose, est.depth.z, scene.cam);
    out.push_back(std::move(est));
  }
  return out;
}

FrameResult evaluate_persons(std::vector<EstimatedPerson> persons,
                             const SceneSample& scene, const PipelineConfig& cfg) {
  FrameResult result;
  std::vector<PersonObs> pred;
  for (const auto& p : persons) pred.push_back({p.pose3d, p.pose25d});
  EvalConfig eval = cfg.eval;
  eval.root_index = scene.skeleton.root_index();
  result.eval = evaluate_frame(scene.frame_id, pred, ground_truth_obs(scene), eval);
  result.persons = std::move(persons);
  return result;
}

FrameResult run_frame(const SceneSample& scene, const NoiseModel& noise,
                      const PipelineConfig& cfg, std::uint64_t seed,
                      const DenseMaps* maps) {
  noise.validate();
  const SceneSample observed =
      noise.occlusion_rate > 0.0 ? with_occlusion(scene, noise.occlusion_rate, derive_seed(seed, 1))
                                 : scene;
  DenseMaps rendered;
  if (maps == nullptr) {
    RenderConfig rc = render_config_for(observed, cfg.stride);
    rc.offset_pixel_sigma = noise.pixel_sigma;
    rc.offset_zrel_sigma = noise.zrel_sigma;
    rc.seed = derive_seed(seed, 2);
    rendered = render_maps(observed, rc);
    maps = &rendered;
  }
  const auto poses = decode_poses(*maps, scene.skeleton, cfg.decode);
  auto persons = estimate_persons(poses, scene, noise, cfg, derive_seed(seed, 3));
  return evaluate_persons(std::move(persons), scene, cfg);
}

EvalReport end_to_end(const std::vector<SceneSample>& scenes, const NoiseModel& noise,
                      const PipelineConfig& cfg, std::uint64_t seed, int workers,
                      const std::vector<DenseMaps>* maps) {
  if (maps != nullptr && maps->size() != scenes.size()) {
    throw Error(ErrorCode::InvalidConfig, "one map set per scene is required");
  }
  std::vector<FrameEval> frames(scenes.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < scenes.size(); i = next++) {
      try {
        const auto frame_seed = derive_seed(seed, static_cast<std::uint64_t>(scenes[i].frame_id));
        frames[i] = run_frame(scenes[i], noise, cfg, frame_seed,
                              maps != nullptr ? &(*maps)[i] : nullptr).eval;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(scenes.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return make_report(std::move(frames), cfg.eval);
}

}  // namespace geodepth
