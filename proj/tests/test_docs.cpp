// Every `name` = value pair in the docs must equal the compiled default.

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "geodepth/geo_depth.hpp"
#include "geodepth/io.hpp"
#include "geodepth/metrics.hpp"
#include "geodepth/pipeline.hpp"
#include "geodepth/posedecode.hpp"
#include "geodepth/synth.hpp"
#include "geodepth/verify.hpp"

using namespace geodepth;
namespace fs = std::filesystem;

namespace {

std::map<std::string, double> library_defaults() {
  const RenderConfig render;
  const DecodeConfig decode;
  const PipelineConfig pipeline;
  const RegressionOracle reg;
  const EvalConfig eval;
  const SceneConfig scene;
  const FusionBenchConfig bench;
  return {
      {"geo.tangent_eps", kDefaultTangentEps},
      {"verify.argmin_lo", kArgminLo},
      {"verify.argmin_hi", kArgminHi},
      {"verify.argmin_grid", kArgminGrid},
      {"verify.fd_step", kFdStep},
      {"verify.abs_floor", kGradAbsFloor},
      {"verify.near_tangent", kNearTangent},
      {"render.stride", render.stride},
      {"render.sigma_cells", render.sigma_cells},
      {"render.paf_width_cells", render.paf_width_cells},
      {"render.offset_radius_cells", render.offset_radius_cells},
      {"decode.nms_radius_px", decode.nms_radius_px},
      {"decode.min_score", decode.min_score},
      {"decode.threshold", decode.threshold},
      {"paf.samples", decode.paf.samples},
      {"paf.min_fraction", decode.paf.min_fraction},
      {"paf.min_dot", decode.paf.min_dot},
      {"pipeline.omega_default", pipeline.omega_default},
      {"pipeline.heatmap_pixel_sigma", pipeline.heatmap_pixel_sigma},
      {"pipeline.sigma_floor", pipeline.sigma_floor},
      {"regression.rel_sigma_min", reg.rel_sigma_min},
      {"regression.rel_sigma_max", reg.rel_sigma_max},
      {"metrics.pck_threshold", eval.pck_threshold},
      {"metrics.match_threshold", eval.match_threshold},
      {"metrics.pcod_tie_band", eval.pcod_tie_band},
      {"metrics.root_index", eval.root_index},
      {"scene.fx", scene.cam.fx},
      {"scene.fy", scene.cam.fy},
      {"scene.cx", scene.cam.cx},
      {"scene.cy", scene.cam.cy},
      {"scene.image_width", scene.image_width},
      {"scene.image_height", scene.image_height},
      {"scene.depth_min", scene.depth_min},
      {"scene.depth_max", scene.depth_max},
      {"scene.torso_min", scene.torso_min},
      {"scene.torso_max", scene.torso_max},
      {"scene.limb_jitter", scene.limb_jitter},
      {"scene.max_yaw_rad", scene.max_yaw_rad},
      {"scene.root_margin_px", scene.root_margin_px},
      {"scene.box_padding_px", scene.box_padding_px},
      {"fusion_bench.samples", bench.samples},
      {"fusion_bench.pixel_sigma", bench.noise.pixel_sigma},
      {"fusion_bench.zrel_sigma", bench.noise.zrel_sigma},
      {"fusion_bench.omega_error", bench.noise.omega_error},
  };
}

// Numeric RunConfig fields by config-file key.
std::map<std::string, std::function<double(const cli::RunConfig&)>> run_config_fields() {
  using R = cli::RunConfig;
  return {
      {"frames", [](const R& c) { return c.frames; }},
      {"persons_min", [](const R& c) { return c.persons_min; }},
      {"persons_max", [](const R& c) { return c.persons_max; }},
      {"workers", [](const R& c) { return c.workers; }},
      {"pixel_sigma", [](const R& c) { return c.pixel_sigma; }},
      {"zrel_sigma", [](const R& c) { return c.zrel_sigma; }},
      {"omega_error", [](const R& c) { return c.omega_error; }},
      {"occlusion_rate", [](const R& c) { return c.occlusion_rate; }},
      {"reg_sigma_min", [](const R& c) { return c.reg_sigma_min; }},
      {"reg_sigma_max", [](const R& c) { return c.reg_sigma_max; }},
      {"omega", [](const R& c) { return c.omega; }},
      {"stride", [](const R& c) { return c.stride; }},
      {"threshold", [](const R& c) { return c.threshold; }},
      {"nms_radius", [](const R& c) { return c.nms_radius; }},
      {"tangent_eps", [](const R& c) { return c.tangent_eps; }},
      {"pck_threshold", [](const R& c) { return c.pck_threshold; }},
      {"match_threshold", [](const R& c) { return c.match_threshold; }},
      {"count", [](const R& c) { return c.count; }},
      {"no_real_root", [](const R& c) { return c.no_real_root; }},
      {"tangent_cases", [](const R& c) { return c.tangent_cases; }},
      {"fd_step", [](const R& c) { return c.fd_step; }},
      {"tolerance", [](const R& c) { return c.tolerance; }},
      {"samples", [](const R& c) { return c.samples; }},
  };
}

std::optional<double> code_default(const std::string& name) {
  static const auto lib = library_defaults();
  if (auto it = lib.find(name); it != lib.end()) return it->second;
  const auto dot = name.find('.');
  if (dot == std::string::npos) return std::nullopt;
  const std::string sub = name.substr(0, dot);
  if (sub != "eval" && sub != "gradcheck" && sub != "oracle" && sub != "bench" &&
      sub != "plot" && sub != "synth-gen") {
    return std::nullopt;
  }
  static const auto fields = run_config_fields();
  const auto f = fields.find(name.substr(dot + 1));
  if (f == fields.end()) return std::nullopt;
  return f->second(cli::subcommand_defaults(sub));
}

struct Mention {
  std::string file;
  std::string name;
  std::string value;
};

std::vector<Mention> extract() {
  const fs::path root = GEODEPTH_SOURCE_DIR;
  std::vector<fs::path> files = {root / "README.md"};
  for (const auto& e : fs::directory_iterator(root / "docs")) {
    if (e.path().extension() == ".md") files.push_back(e.path());
  }
  const std::regex pair("`([A-Za-z][A-Za-z0-9_.-]*)`\\s*=\\s*([-+]?[0-9][0-9.]*(?:[eE][-+]?[0-9]+)?)");
  std::vector<Mention> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    REQUIRE_MESSAGE(in.good(), "cannot read " << f);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    for (auto it = std::sregex_iterator(text.begin(), text.end(), pair); it != std::sregex_iterator();
         ++it) {
      out.push_back({f.filename().string(), (*it)[1], (*it)[2]});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("documented constants match the code") {
  const auto mentions = extract();
  // The defaults reference alone names well over fifty.
  CHECK(mentions.size() > 60);
  for (const auto& m : mentions) {
    CAPTURE(m.file);
    CAPTURE(m.name);
    CAPTURE(m.value);
    const auto expected = code_default(m.name);
    REQUIRE_MESSAGE(expected.has_value(), "unknown constant " << m.name << " in " << m.file);
    const double documented = std::stod(m.value);
    CHECK(std::abs(documented - *expected) <= 1e-12 * std::max(1.0, std::abs(*expected)));
  }
}

TEST_CASE("documented binary header matches the encoder") {
  // magic, version, H, W, stride, J, L
  const DenseMaps maps(3, 2, 5, 7, 4);
  const std::string bytes = io::encode_maps(maps);
  CHECK(bytes.substr(0, 4) == "GDMP");
  CHECK(bytes.size() == 28 + 4 * 5 * 7 * (3 + 2 * 2 + 3 * (3 - 1)));
  auto u32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
    return v;
  };
  CHECK(u32(4) == 1);
  CHECK(u32(8) == 5);
  CHECK(u32(12) == 7);
  CHECK(u32(16) == 4);
  CHECK(u32(20) == 3);
  CHECK(u32(24) == 2);
}
