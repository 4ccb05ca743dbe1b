#include <cmath>

#include "doctest.h"
#include "geodepth/error.hpp"
#include "geodepth/pipeline.hpp"

using namespace geodepth;

namespace {

std::vector<SceneSample> fixture_scenes(int count, std::uint64_t seed) {
  SceneConfig cfg;
  cfg.non_overlapping = true;
  std::vector<SceneSample> scenes;
  for (int i = 0; i < count; ++i) {
    scenes.push_back(generate_scene(1 + i % 4, derive_seed(seed, i), cfg, i));
  }
  return scenes;
}

PipelineConfig noise_free_config() {
  PipelineConfig cfg;
  cfg.reg.rel_sigma_min = cfg.reg.rel_sigma_max = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("zero-noise pipeline is perfect") {
  const auto report = end_to_end(fixture_scenes(40, 1), {}, noise_free_config(), 9, 2);
  CHECK(report.summary.pck_rel == 100.0);
  CHECK(report.summary.pck_abs == 100.0);
  CHECK(report.summary.pck_root == 100.0);
  CHECK(report.summary.pcod == 100.0);
  CHECK(report.summary.mrpe_z < 1.0);
  CHECK(report.summary.matched_count == report.summary.gt_count);
}

TEST_CASE("geometry alone is exact without noise") {
  auto cfg = noise_free_config();
  cfg.use_reg = false;
  const auto report = end_to_end(fixture_scenes(20, 2), {}, cfg, 3);
  CHECK(report.summary.pck_abs == 100.0);
  CHECK(report.summary.mrpe_z < 1.0);
}

TEST_CASE("worker count does not change the report") {
  NoiseModel noise{2.0, 0.02, 0.05, 0.1};
  const auto scenes = fixture_scenes(24, 3);
  const PipelineConfig cfg;
  const auto a = end_to_end(scenes, noise, cfg, 17, 1);
  const auto b = end_to_end(scenes, noise, cfg, 17, 4);
  REQUIRE(a.frames.size() == b.frames.size());
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    CHECK(a.frames[i].frame_id == b.frames[i].frame_id);
    CHECK(a.frames[i].mrpe_z == b.frames[i].mrpe_z);
    CHECK(a.frames[i].pck_abs == b.frames[i].pck_abs);
  }
}

TEST_CASE("adaptive fusion beats either depth alone under noise") {
  NoiseModel noise{2.0, 0.02, 0.05, 0.0};
  const auto scenes = fixture_scenes(150, 4);
  PipelineConfig full;
  PipelineConfig geo_only = full;
  geo_only.use_reg = false;
  PipelineConfig reg_only = full;
  reg_only.use_geo = false;
  PipelineConfig averaged = full;
  averaged.use_fusion = false;
  const double fused = end_to_end(scenes, noise, full, 5).summary.mrpe_z;
  const double geo = end_to_end(scenes, noise, geo_only, 5).summary.mrpe_z;
  const double reg = end_to_end(scenes, noise, reg_only, 5).summary.mrpe_z;
  const double avg = end_to_end(scenes, noise, averaged, 5).summary.mrpe_z;
  MESSAGE("MRPE_z fused " << fused << " geo " << geo << " reg " << reg << " avg " << avg);
  CHECK(fused <= std::min(geo, reg) * 1.01);
  CHECK(fused < avg);
}

TEST_CASE("missing both depth branches is a configuration error") {
  PipelineConfig cfg;
  cfg.use_geo = cfg.use_reg = false;
  CHECK_THROWS_AS(end_to_end(fixture_scenes(1, 5), {}, cfg, 1), Error);
}

TEST_CASE("an assumed torso length biases depth") {
  auto cfg = noise_free_config();
  cfg.use_reg = false;
  cfg.known_omega = false;
  cfg.omega_default = 0.6;
  const auto report = end_to_end(fixture_scenes(20, 6), {}, cfg, 1);
  CHECK(report.summary.matched_count == report.summary.gt_count);
  CHECK(report.summary.mrpe_z > 1.0);
}
