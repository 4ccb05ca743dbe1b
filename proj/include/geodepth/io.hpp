#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geodepth/dense_maps.hpp"
#include "geodepth/metrics.hpp"
#include "geodepth/scene.hpp"
#include "geodepth/uncertainty.hpp"

namespace geodepth::io {

inline constexpr const char* kSceneVersion = "geodepth-scene/1";
inline constexpr const char* kPredictionVersion = "geodepth-pred/1";

/// Canonical JSON: sorted keys, meters and pixels.
nlohmann::json scene_to_json(const SceneSample& scene);
/// Throws SchemaError listing every violation found.
SceneSample scene_from_json(const nlohmann::json& doc);

/// Throws ParseError (with line and column) or SchemaError.
SceneSample read_scene(const std::filesystem::path& path);
void write_scene(const std::filesystem::path& path, const SceneSample& scene);
std::string canonical_dump(const nlohmann::json& doc);

/// Externally produced 2.5D poses with optional direct depth beliefs.
struct PredictedPerson {
  Pose25D pose;
  std::optional<DepthEstimate> reg;
  std::optional<double> omega;
};

struct PredictionSet {
  std::int64_t frame_id = 0;
  std::vector<PredictedPerson> persons;
};

nlohmann::json predictions_to_json(const PredictionSet& set,
                                   const SkeletonDef& skel);
PredictionSet predictions_from_json(const nlohmann::json& doc,
                                    const SkeletonDef& skel);
PredictionSet read_predictions(const std::filesystem::path& path,
                               const SkeletonDef& skel);
void write_predictions(const std::filesystem::path& path,
                       const PredictionSet& set, const SkeletonDef& skel);

/// Binary tensor file: "GDMP", u32 version, H, W, stride, J, limb count,
/// then little-endian float32 heatmaps, PAFs and offsets.
void write_maps(const std::filesystem::path& path, const DenseMaps& maps);
DenseMaps read_maps(const std::filesystem::path& path);
std::string encode_maps(const DenseMaps& maps);
DenseMaps decode_maps(const std::string& bytes);

enum class ReportFormat { Csv, Text };

std::string format_report_csv(const EvalReport& report);
std::string format_report_text(const EvalReport& report);
/// Throws IoError.
void write_report(const EvalReport& report, const std::filesystem::path& path,
                  ReportFormat format);

/// Writes `contents` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path,
                     const std::string& contents);

}  // namespace geodepth::io
