#include <cmath>

#include "doctest.h"
#include "geodepth/error.hpp"
#include "geodepth/posedecode.hpp"
#include "geodepth/synth.hpp"

using namespace geodepth;

namespace {

const SkeletonDef& skel() { return SkeletonDef::mupots15(); }

SceneConfig clean_scene_config() {
  SceneConfig cfg;
  cfg.non_overlapping = true;
  cfg.fully_visible = true;
  cfg.depth_min = 5.0;
  return cfg;
}

// Index of the decoded pose whose root is closest to the given pixel.
int nearest(const std::vector<Pose25D>& poses, const Pixel& px) {
  int best = -1;
  double best_d = 1e300;
  for (int i = 0; i < static_cast<int>(poses.size()); ++i) {
    const auto& r = poses[i].joints[14];
    const double d = std::hypot(r.u - px.u, r.v - px.v);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

struct DecodeStats {
  double max_px = 0.0;
  double max_zrel = 0.0;
  bool all_found = true;
};

DecodeStats decode_and_compare(const SceneSample& scene, const std::vector<Pose25D>& poses) {
  DecodeStats s;
  if (poses.size() != scene.persons.size()) s.all_found = false;
  for (const auto& p : scene.persons) {
    const Point3D& root = p.joints.joints[14];
    const int i = nearest(poses, project(root, scene.cam));
    if (i < 0) {
      s.all_found = false;
      continue;
    }
    for (int k = 0; k < 15; ++k) {
      const Pixel px = project(p.joints.joints[k], scene.cam);
      const auto& d = poses[i].joints[k];
      s.max_px = std::max(s.max_px, std::hypot(d.u - px.u, d.v - px.v));
      s.max_zrel = std::max(s.max_zrel, std::abs(d.z_rel - (p.joints.joints[k].z - root.z)));
    }
  }
  return s;
}

}  // namespace

TEST_CASE("empty maps decode to nothing") {
  const DenseMaps maps(15, 14, 20, 30, 4);
  CHECK(decode_poses(maps, skel()).empty());
  CHECK(extract_peaks(maps, 12, 0.1)[0].empty());
}

TEST_CASE("peaks are refined to sub-cell accuracy") {
  DenseMaps maps(1, 0, 40, 60, 4);
  const double cx[2] = {10.3, 45.75}, cy[2] = {12.6, 30.1};
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 60; ++x) {
      float v = 0;
      for (int g = 0; g < 2; ++g) {
        const double d2 = (x - cx[g]) * (x - cx[g]) + (y - cy[g]) * (y - cy[g]);
        v = std::max(v, static_cast<float>((g == 0 ? 0.9 : 0.6) * std::exp(-d2 / 8.0)));
      }
      maps.heat(0, y, x) = v;
    }
  }
  const auto peaks = extract_peaks(maps, 12, 0.1);
  REQUIRE(peaks[0].size() == 2);
  CHECK(peaks[0][0].score > peaks[0][1].score);
  CHECK(peaks[0][0].u == doctest::Approx(4 * 10.3).epsilon(1e-5));
  CHECK(peaks[0][0].v == doctest::Approx(4 * 12.6).epsilon(1e-5));
  CHECK(peaks[0][1].u == doctest::Approx(4 * 45.75).epsilon(1e-5));
  CHECK(peaks[0][1].v == doctest::Approx(4 * 30.1).epsilon(1e-5));
  // A large suppression radius keeps only the stronger one.
  CHECK(extract_peaks(maps, 1000, 0.1)[0].size() == 1);
}

TEST_CASE("offset decoding") {
  DenseMaps maps(15, 14, 20, 30, 4);
  const auto zero = decode_offsets({40, 40}, maps, skel());
  for (int k = 0; k < 15; ++k) {
    CHECK(zero.joints[k].u == 40);
    CHECK(zero.joints[k].v == 40);
    CHECK(zero.joints[k].z_rel == 0);
    CHECK(zero.source[k] == JointSource::Offset);
  }
  maps.offset(skel().offset_channel(0), 0, 10, 10) = 5.5f;
  maps.offset(skel().offset_channel(0), 1, 10, 10) = -80.0f;
  maps.offset(skel().offset_channel(0), 2, 10, 10) = 0.25f;
  const auto head = decode_offsets({40.4, 39.8}, maps, skel()).joints[0];
  CHECK(head.u == doctest::Approx(45.9));
  CHECK(head.v == doctest::Approx(-40.2));
  CHECK(head.z_rel == 0.25);
  for (Pixel bad : {Pixel{-10, 5}, Pixel{5, 5000}, Pixel{std::nan(""), 0}}) {
    try {
      decode_offsets(bad, maps, skel());
      FAIL("expected OutOfBounds");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutOfBounds);
    }
  }
}

TEST_CASE("structured fusion picks the source by confidence") {
  Pose25D heat = Pose25D::empty(15), off = Pose25D::empty(15);
  for (int k = 0; k < 15; ++k) {
    heat.joints[k] = {100.0 + k, 50.0, 0.0};
    off.joints[k] = {200.0 + k, 60.0, 0.1 * k};
    off.valid[k] = true;
  }
  heat.valid[0] = true;
  heat.score[0] = 0.9;  // confident
  heat.valid[2] = true;
  heat.score[2] = 0.3;  // at threshold
  heat.valid[3] = true;
  heat.score[3] = 0.29;  // just below
  const auto f = fuse_structured(heat, off, 0.3);
  CHECK(f.source[0] == JointSource::Heatmap);
  CHECK(f.joints[0].u == 100.0);
  CHECK(f.joints[0].z_rel == 0.0);
  CHECK(f.source[2] == JointSource::Heatmap);
  CHECK(f.joints[2].z_rel == doctest::Approx(0.2));
  CHECK(f.source[3] == JointSource::Offset);
  CHECK(f.joints[3].u == 203.0);
  CHECK(f.source[5] == JointSource::Offset);  // undetected
  CHECK(f.valid[5]);

  const auto all_offset = fuse_structured(heat, off, 1.1);
  for (int k = 0; k < 15; ++k) CHECK(all_offset.source[k] == JointSource::Offset);
  const auto all_heat = fuse_structured(heat, off, 0.0);
  CHECK(all_heat.source[3] == JointSource::Heatmap);
}

TEST_CASE("noise-free render then decode recovers every person") {
  for (int n = 1; n <= 5; ++n) {
    for (std::uint64_t s = 0; s < 8; ++s) {
      const auto scene = generate_scene(n, derive_seed(s, n), clean_scene_config());
      const auto maps = render_maps(scene, render_config_for(scene, 4));
      const auto poses = decode_poses(maps, skel());
      const auto stats = decode_and_compare(scene, poses);
      CHECK(stats.all_found);
      CHECK(stats.max_px < 2.0);
      CHECK(stats.max_zrel < 1e-6);
      for (const auto& p : poses) {
        for (int k = 0; k < 15; ++k) CHECK(p.source[k] == JointSource::Heatmap);
      }
    }
  }
}

TEST_CASE("occluded joints fall back to offsets") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto base = generate_scene(3, s, clean_scene_config());
    const auto scene = with_occlusion(base, 0.3, derive_seed(s, 5));
    const auto maps = render_maps(scene, render_config_for(scene, 4));
    const auto poses = decode_poses(maps, skel());
    REQUIRE(poses.size() == scene.persons.size());
    for (const auto& p : scene.persons) {
      const int i = nearest(poses, project(p.joints.joints[14], scene.cam));
      for (int k = 0; k < 15; ++k) {
        if (!p.occluded[k]) continue;
        CHECK(poses[i].source[k] == JointSource::Offset);
        const Pixel px = project(p.joints.joints[k], scene.cam);
        CHECK(std::hypot(poses[i].joints[k].u - px.u, poses[i].joints[k].v - px.v) < 1.0);
      }
    }
  }
}

TEST_CASE("ablation toggles") {
  const auto base = generate_scene(2, 3, clean_scene_config());
  const auto scene = with_occlusion(base, 0.4, 17);
  const auto maps = render_maps(scene, render_config_for(scene, 4));
  DecodeConfig heat_only;
  heat_only.use_offset = false;
  DecodeConfig offset_only;
  offset_only.use_heatmap = false;
  const auto h = decode_poses(maps, skel(), heat_only);
  const auto o = decode_poses(maps, skel(), offset_only);
  REQUIRE(h.size() == 2);
  REQUIRE(o.size() == 2);
  bool some_invalid = false;
  for (const auto& p : h) {
    for (int k = 0; k < 15; ++k) {
      if (!p.valid[k]) {
        some_invalid = true;
        CHECK(p.joints[k].u == p.joints[14].u);
        CHECK(p.joints[k].v == p.joints[14].v);
      }
    }
  }
  CHECK(some_invalid);
  for (const auto& p : o) {
    for (int k = 0; k < 15; ++k) {
      CHECK(p.valid[k]);
      CHECK(p.source[k] == JointSource::Offset);
    }
  }
  DecodeConfig neither;
  neither.use_heatmap = neither.use_offset = false;
  CHECK_THROWS_AS(decode_poses(maps, skel(), neither), Error);
}

TEST_CASE("noisy offsets: combined decoding beats offsets alone") {
  double err_full = 0, err_offset = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto scene = with_occlusion(generate_scene(2, s, clean_scene_config()), 0.2, s + 100);
    auto rc = render_config_for(scene, 4);
    rc.offset_pixel_sigma = 6.0;
    const auto maps = render_maps(scene, rc);
    DecodeConfig off;
    off.use_heatmap = false;
    const auto full = decode_and_compare(scene, decode_poses(maps, skel()));
    const auto only = decode_and_compare(scene, decode_poses(maps, skel(), off));
    err_full += full.max_px;
    err_offset += only.max_px;
  }
  CHECK(err_full < err_offset);
}

TEST_CASE("overlapping offset disks keep the nearer person") {
  SceneSample scene;
  scene.cam = {1000, 1000, 640, 360};
  const auto make = [&](double x, double z, double head_dz) {
    ScenePerson p;
    p.joints = Pose3D::empty(15);
    for (int k = 0; k < 15; ++k) {
      p.joints.joints[k] = {x, 0.1 * k - 0.7, z};
      p.joints.valid[k] = true;
    }
    p.joints.joints[0].z = z + head_dz;
    p.omega = 0.5;
    p.occluded.assign(15, false);
    return p;
  };
  // Roots 2 px apart in the image: same offset cells.
  scene.persons = {make(0.0, 8.0, 0.3), make(0.016, 4.0, -0.2)};
  const auto maps = render_maps(scene, render_config_for(scene, 4));
  const Pixel near_root = project(scene.persons[1].joints.joints[14], scene.cam);
  const auto pose = decode_offsets(near_root, maps, skel());
  CHECK(pose.joints[0].z_rel == doctest::Approx(-0.2).epsilon(1e-6));
}
