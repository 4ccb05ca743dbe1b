#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "geodepth/metrics.hpp"
#include "oracles.hpp"

using namespace geodepth;

namespace {

PersonObs person_at(double x, double z, double u) {
  PersonObs p;
  p.pose3d = Pose3D::empty(15);
  p.pose2d = Pose25D::empty(15);
  for (int k = 0; k < 15; ++k) {
    p.pose3d.joints[k] = {x, 0.1 * k, z};
    p.pose3d.valid[k] = true;
    p.pose2d.joints[k] = {u, 10.0 * k, 0.0};
    p.pose2d.valid[k] = true;
  }
  return p;
}

void shift(PersonObs& p, const Point3D& d) {
  for (auto& j : p.pose3d.joints) {
    j.x += d.x;
    j.y += d.y;
    j.z += d.z;
  }
}

}  // namespace

TEST_CASE("PCK on a translated prediction") {
  const std::vector<PersonObs> gt{person_at(0, 5, 100)};
  auto pred = gt;
  shift(pred[0], {0.3, 0, 0});
  const EvalConfig cfg;
  const auto m = match_persons(pred, gt, cfg);
  REQUIRE(m.pairs.size() == 1);
  CHECK(pck_rel(m, pred, gt, cfg) == 100.0);
  CHECK(pck_abs(m, pred, gt, cfg) == 0.0);
  CHECK(pck_root(m, pred, gt, cfg) == 0.0);
  const auto e = mrpe(m, pred, gt, cfg);
  CHECK(e.x == doctest::Approx(300.0));
  CHECK(e.y == 0.0);
  CHECK(e.z == 0.0);
}

TEST_CASE("PCK threshold is inclusive") {
  const std::vector<PersonObs> gt{person_at(0, 5, 100)};
  auto pred = gt;
  shift(pred[0], {0.125, 0, 0});
  EvalConfig cfg;
  cfg.pck_threshold = 0.125;
  const auto m = match_persons(pred, gt, cfg);
  CHECK(pck_abs(m, pred, gt, cfg) == 100.0);
}

TEST_CASE("unmatched ground truth and the two regimes") {
  const std::vector<PersonObs> gt{person_at(0, 5, 100), person_at(1, 6, 600)};
  const std::vector<PersonObs> pred{gt[0]};
  EvalConfig all;
  const auto m = match_persons(pred, gt, all);
  CHECK(m.pairs.size() == 1);
  CHECK(pck_abs(m, pred, gt, all) == 50.0);
  CHECK(pck_root_counts(m, pred, gt, all) == Counts{1, 2});
  EvalConfig matched = all;
  matched.include_unmatched = false;
  CHECK(pck_abs(m, pred, gt, matched) == 100.0);
  // Fewer than two matched persons: PCOD has no pairs.
  CHECK(std::isnan(pcod(m, pred, gt, all)));
}

TEST_CASE("no matches") {
  const std::vector<PersonObs> gt{person_at(0, 5, 100)};
  const std::vector<PersonObs> pred{person_at(0, 5, 900)};
  const EvalConfig cfg;
  const auto m = match_persons(pred, gt, cfg);
  CHECK(m.pairs.empty());
  CHECK(pck_rel(m, pred, gt, cfg) == 0.0);
  CHECK(std::isnan(mrpe(m, pred, gt, cfg).z));
  const auto f = evaluate_frame(3, pred, gt, cfg);
  CHECK(f.matched_count == 0);
  CHECK(f.gt_count == 1);
  CHECK(std::isnan(summarize(f).mrpe_z));
  CHECK(summarize(f).pck_rel == 0.0);
}

TEST_CASE("greedy matching takes the closest pair first") {
  const std::vector<PersonObs> gt{person_at(0, 5, 100), person_at(0, 5, 130)};
  // One prediction between them, nearer the second.
  const std::vector<PersonObs> pred{person_at(0, 5, 120)};
  const auto m = match_persons(pred, gt, EvalConfig{});
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0] == std::pair<int, int>{1, 0});
}

TEST_CASE("PCOD with one swapped pair") {
  std::vector<PersonObs> gt;
  for (int i = 0; i < 4; ++i) gt.push_back(person_at(i, 3.0 + i, 100.0 + 300 * i));
  auto pred = gt;
  std::swap(pred[1].pose3d.joints[14].z, pred[2].pose3d.joints[14].z);
  const EvalConfig cfg;
  const auto m = match_persons(pred, gt, cfg);
  CHECK(pcod_counts(m, pred, gt, cfg) == Counts{5, 6});
  const auto brute = oracle::brute_force_metrics(m.pairs, pred, gt, 0.15, 0.01, 14, true);
  CHECK(brute.pcod_correct == 5);
  CHECK(brute.pcod_total == 6);
}

TEST_CASE("PCOD equality band") {
  std::vector<PersonObs> gt{person_at(0, 4.0, 100), person_at(1, 4.005, 600)};
  auto pred = gt;
  pred[1].pose3d.joints[14].z = 4.5;
  const EvalConfig cfg;
  const auto m = match_persons(pred, gt, cfg);
  CHECK(pcod_counts(m, pred, gt, cfg) == Counts{0, 1});
  pred[1].pose3d.joints[14].z = 3.995;
  CHECK(pcod_counts(m, pred, gt, cfg) == Counts{1, 1});
}

TEST_CASE("random frames agree with the brute-force oracle") {
  const EvalConfig cfg;
  for (bool include : {true, false}) {
    EvalConfig c = cfg;
    c.include_unmatched = include;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto f = fixtures::random_eval_frame(s);
      const auto m = match_persons(f.pred, f.gt, c);
      const auto pairs = oracle::brute_force_matching(f.pred, f.gt, c.match_threshold);
      CHECK(m.pairs == pairs);
      const auto b = oracle::brute_force_metrics(pairs, f.pred, f.gt, c.pck_threshold,
                                                 c.pcod_tie_band, 14, include);
      const auto e = evaluate_frame(static_cast<std::int64_t>(s), f.pred, f.gt, c);
      CHECK(e.rel == Counts{b.rel_correct, b.rel_total});
      CHECK(e.abs == Counts{b.abs_correct, b.abs_total});
      CHECK(e.root == Counts{b.root_correct, b.root_total});
      CHECK(e.ordinal == Counts{b.pcod_correct, b.pcod_total});
      CHECK(e.matched_count == b.matched);
      CHECK(e.root_error_sum.x == b.mrpe_x);
      CHECK(e.root_error_sum.y == b.mrpe_y);
      CHECK(e.root_error_sum.z == b.mrpe_z);
    }
  }
}

TEST_CASE("PCK_rel ignores per-person translation; PCOD ignores monotone depth maps") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0, 1);
  std::uniform_real_distribution<double> unit(0, 1);
  const EvalConfig cfg;
  int checked = 0;
  for (std::uint64_t s = 0; checked < 1000; ++s) {
    const auto f = fixtures::random_eval_frame(1000 + s);
    // Compare the pairing fixed up front; transforms leave 2D untouched.
    const auto m = match_persons(f.pred, f.gt, cfg);
    auto moved = f.pred;
    for (auto& p : moved) shift(p, {gauss(rng), gauss(rng), gauss(rng)});
    CHECK(pck_rel_counts(m, moved, f.gt, cfg) == pck_rel_counts(m, f.pred, f.gt, cfg));

    // Strictly increasing maps that never shrink depth gaps keep each pair
    // on the same side of the equality band.
    const double scale = 1.0 + 3.0 * unit(rng);
    const double offset = 5.0 * gauss(rng);
    const double cubic = unit(rng);
    const auto warp = [&](double z) { return scale * z + offset + cubic * z * z * z; };
    auto warped = f.pred;
    auto warped_gt = f.gt;
    for (auto& p : warped) p.pose3d.joints[14].z = warp(p.pose3d.joints[14].z);
    for (auto& p : warped_gt) p.pose3d.joints[14].z = warp(p.pose3d.joints[14].z);
    const auto before = pcod_counts(m, f.pred, f.gt, cfg);
    const auto after_pred = pcod_counts(m, warped, f.gt, cfg);
    const auto after_both = pcod_counts(m, warped, warped_gt, cfg);
    CHECK(before.total == after_pred.total);
    // Gaps outside the band stay outside; only in-band pairs can change, and
    // the generator never puts GT pairs inside the band.
    const bool pred_band_free = [&] {
      for (std::size_t i = 0; i < m.pairs.size(); ++i)
        for (std::size_t j = i + 1; j < m.pairs.size(); ++j)
          if (std::abs(f.pred[m.pairs[i].second].pose3d.joints[14].z -
                       f.pred[m.pairs[j].second].pose3d.joints[14].z) < cfg.pcod_tie_band)
            return false;
      return true;
    }();
    if (pred_band_free) CHECK(after_pred == before);
    CHECK(after_both.total == before.total);
    ++checked;
  }
}

TEST_CASE("prediction order does not matter") {
  const EvalConfig cfg;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto f = fixtures::random_eval_frame(s + 7000);
    auto perm = f.pred;
    std::reverse(perm.begin(), perm.end());
    const auto a = evaluate_frame(0, f.pred, f.gt, cfg);
    const auto b = evaluate_frame(0, perm, f.gt, cfg);
    CHECK(a.rel == b.rel);
    CHECK(a.abs == b.abs);
    CHECK(a.ordinal == b.ordinal);
    CHECK(a.matched_count == b.matched_count);
  }
}

TEST_CASE("report folds counts across frames") {
  const EvalConfig cfg;
  std::vector<FrameEval> frames;
  Counts rel;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = fixtures::random_eval_frame(s + 9000);
    frames.push_back(evaluate_frame(static_cast<std::int64_t>(19 - s), f.pred, f.gt, cfg));
    rel += frames.back().rel;
  }
  const auto report = make_report(frames, cfg);
  REQUIRE(report.frames.size() == 20);
  CHECK(report.frames.front().frame_id == 0);
  CHECK(report.frames.back().frame_id == 19);
  CHECK(report.summary.pck_rel == doctest::Approx(rel.percent()));
  for (const auto& r : report.frames) {
    CHECK(r.matched_count <= r.gt_count);
    if (!std::isnan(r.pck_abs)) {
      CHECK(r.pck_abs >= 0.0);
      CHECK(r.pck_abs <= 100.0);
    }
  }
}
