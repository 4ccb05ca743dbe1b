#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "geodepth/skeleton.hpp"

namespace geodepth {

struct EvalConfig {
  double pck_threshold = 0.15;   // meters
  double match_threshold = 40.0; // mean 2D joint distance, pixels
  /// "All people" regime: unmatched ground-truth persons score zero.
  bool include_unmatched = true;
  double pcod_tie_band = 0.01;   // meters
  int root_index = 14;
};

/// One person as both a camera-space pose and its image-space pose; only
/// (u, v) of the 2.5D pose is used, for matching.
struct PersonObs {
  Pose3D pose3d;
  Pose25D pose2d;
};

struct Pairing {
  std::vector<std::pair<int, int>> pairs;  // (gt index, pred index)
  int gt_count = 0;
  int pred_count = 0;
};

struct Counts {
  std::int64_t correct = 0;
  std::int64_t total = 0;

  Counts& operator+=(const Counts& o) {
    correct += o.correct;
    total += o.total;
    return *this;
  }
  bool operator==(const Counts&) const = default;
  /// Percentage, NaN when total is zero.
  double percent() const;
};

/// Greedy one-to-one assignment by ascending mean 2D joint distance over
/// joints valid in both poses; candidates above match_threshold are dropped.
Pairing match_persons(const std::vector<PersonObs>& pred,
                      const std::vector<PersonObs>& gt, const EvalConfig& cfg);

/// Root-aligned 3D PCK.
Counts pck_rel_counts(const Pairing& pairing, const std::vector<PersonObs>& pred,
                      const std::vector<PersonObs>& gt, const EvalConfig& cfg);
Counts pck_abs_counts(const Pairing& pairing, const std::vector<PersonObs>& pred,
                      const std::vector<PersonObs>& gt, const EvalConfig& cfg);
Counts pck_root_counts(const Pairing& pairing, const std::vector<PersonObs>& pred,
                       const std::vector<PersonObs>& gt, const EvalConfig& cfg);
/// Ordinal agreement of root depths over matched person pairs.
Counts pcod_counts(const Pairing& pairing, const std::vector<PersonObs>& pred,
                   const std::vector<PersonObs>& gt, const EvalConfig& cfg);

double pck_rel(const Pairing& pairing, const std::vector<PersonObs>& pred,
               const std::vector<PersonObs>& gt, const EvalConfig& cfg);
double pck_abs(const Pairing& pairing, const std::vector<PersonObs>& pred,
               const std::vector<PersonObs>& gt, const EvalConfig& cfg);
double pck_root(const Pairing& pairing, const std::vector<PersonObs>& pred,
                const std::vector<PersonObs>& gt, const EvalConfig& cfg);
double pcod(const Pairing& pairing, const std::vector<PersonObs>& pred,
            const std::vector<PersonObs>& gt, const EvalConfig& cfg);

struct RootError {
  double x = 0.0;  // millimeters
  double y = 0.0;
  double z = 0.0;
};

/// Mean absolute per-axis root error in millimeters; NaN when nothing matched.
RootError mrpe(const Pairing& pairing, const std::vector<PersonObs>& pred,
               const std::vector<PersonObs>& gt, const EvalConfig& cfg);

/// Per-frame tallies; reports are folds over these.
struct FrameEval {
  std::int64_t frame_id = 0;
  Counts rel;
  Counts abs;
  Counts root;
  Counts ordinal;
  RootError root_error_sum;  // millimeters, summed over matched persons
  int matched_count = 0;
  int gt_count = 0;
};

FrameEval evaluate_frame(std::int64_t frame_id,
                         const std::vector<PersonObs>& pred,
                         const std::vector<PersonObs>& gt,
                         const EvalConfig& cfg);

struct EvalRow {
  std::int64_t frame_id = 0;
  double pck_rel = 0.0;
  double pck_abs = 0.0;
  double pck_root = 0.0;
  double pcod = 0.0;
  double mrpe_x = 0.0;
  double mrpe_y = 0.0;
  double mrpe_z = 0.0;
  int matched_count = 0;
  int gt_count = 0;
};

struct EvalReport {
  std::vector<EvalRow> frames;
  EvalRow summary;
  bool include_unmatched = true;
};

EvalRow summarize(const FrameEval& frame);

/// Frames are sorted by frame_id before folding.
EvalReport make_report(std::vector<FrameEval> frames, const EvalConfig& cfg);

}  // namespace geodepth
