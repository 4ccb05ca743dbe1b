#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "geodepth/error.hpp"
#include "geodepth/io.hpp"
#include "geodepth/pipeline.hpp"
#include "geodepth/posedecode.hpp"
#include "geodepth/synth.hpp"
#include "geodepth/verify.hpp"
#include "svg_plot.hpp"

namespace geodepth::cli {

namespace fs = std::filesystem;

namespace {

// Input problems that should name the offending path.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  return dir;
}

// ---------------------------------------------------------------- options

std::string flag(const std::string& key) {
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

struct Registrar {
  CLI::App* app;
  RunConfig& cfg;

  template <typename T>
  void opt(const std::string& key, T& field, const std::string& help) {
    app->add_option(flag(key), field, help)->capture_default_str();
  }

  void inputs() {
    app->add_option("--input,-i", cfg.input, "Scene JSON files or directories of them");
    opt("out", cfg.out, "Output directory");
  }
  void common() {
    opt("seed", cfg.seed, "Base random seed (default from GEODEPTH_SEED)");
  }
  void scenes() {
    opt("frames", cfg.frames, "Synthetic frames when no input is given");
    opt("persons_min", cfg.persons_min, "Fewest persons per synthetic frame");
    opt("persons_max", cfg.persons_max, "Most persons per synthetic frame");
    opt("non_overlapping", cfg.non_overlapping, "Keep synthetic persons apart in the image");
  }
  void noise() {
    opt("pixel_sigma", cfg.pixel_sigma, "Pixel noise on offsets / observations (px)");
    opt("zrel_sigma", cfg.zrel_sigma, "Noise on relative depth (m)");
    opt("omega_error", cfg.omega_error, "Relative error of the assumed torso length");
    opt("occlusion_rate", cfg.occlusion_rate, "Probability that a non-root joint is hidden");
  }
  void regression() {
    opt("reg_sigma_min", cfg.reg_sigma_min, "Regression depth sigma, lower bound (fraction of depth)");
    opt("reg_sigma_max", cfg.reg_sigma_max, "Regression depth sigma, upper bound (fraction of depth)");
    opt("reg_honest", cfg.reg_honest, "Regression reports its true sigma");
  }
  void pipeline() {
    opt("workers", cfg.workers, "Frames evaluated in parallel");
    opt("use_heatmap", cfg.use_heatmap, "Heatmap joint positions");
    opt("use_offset", cfg.use_offset, "Root-relative offset decoding");
    opt("use_geo", cfg.use_geo, "Geometric root depth");
    opt("use_reg", cfg.use_reg, "Regressed root depth");
    opt("use_fusion", cfg.use_fusion, "Uncertainty-weighted fusion (equal weights when off)");
    opt("known_omega", cfg.known_omega, "Use each person's torso length instead of --omega");
    opt("omega", cfg.omega, "Assumed torso length (m)");
    opt("stride", cfg.stride, "Output stride of rendered maps (px)");
    opt("threshold", cfg.threshold, "Heatmap confidence for keeping heatmap positions");
    opt("nms_radius", cfg.nms_radius, "Peak suppression radius (px)");
    opt("tangent_eps", cfg.tangent_eps, "Guard on |2aZ+b| for gradients");
    opt("pck_threshold", cfg.pck_threshold, "PCK distance threshold (m)");
    opt("match_threshold", cfg.match_threshold, "Person matching threshold (mean px)");
    opt("include_unmatched", cfg.include_unmatched, "Score unmatched ground truth as wrong");
  }
};

NoiseModel noise_of(const RunConfig& c) {
  NoiseModel n{c.pixel_sigma, c.zrel_sigma, c.omega_error, c.occlusion_rate};
  n.validate();
  return n;
}

RegressionOracle reg_of(const RunConfig& c) {
  if (c.reg_sigma_min < 0.0 || c.reg_sigma_max < c.reg_sigma_min) {
    throw Error(ErrorCode::InvalidConfig, "need 0 <= reg_sigma_min <= reg_sigma_max");
  }
  RegressionOracle r;
  r.rel_sigma_min = c.reg_sigma_min;
  r.rel_sigma_max = c.reg_sigma_max;
  r.honest = c.reg_honest;
  return r;
}

PipelineConfig pipeline_of(const RunConfig& c) {
  if (!c.use_geo && !c.use_reg) {
    throw Error(ErrorCode::InvalidConfig, "use_geo and use_reg cannot both be off");
  }
  if (!c.use_heatmap && !c.use_offset) {
    throw Error(ErrorCode::InvalidConfig, "use_heatmap and use_offset cannot both be off");
  }
  if (c.workers < 1) throw Error(ErrorCode::InvalidConfig, "workers must be >= 1");
  PipelineConfig p;
  p.decode.threshold = c.threshold;
  p.decode.nms_radius_px = c.nms_radius;
  p.decode.use_heatmap = c.use_heatmap;
  p.decode.use_offset = c.use_offset;
  p.stride = c.stride;
  p.use_geo = c.use_geo;
  p.use_reg = c.use_reg;
  p.use_fusion = c.use_fusion;
  p.known_omega = c.known_omega;
  p.omega_default = c.omega;
  p.tangent_eps = c.tangent_eps;
  p.reg = reg_of(c);
  p.eval.pck_threshold = c.pck_threshold;
  p.eval.match_threshold = c.match_threshold;
  p.eval.include_unmatched = c.include_unmatched;
  return p;
}

SceneConfig scene_config_of(const RunConfig& c) {
  if (c.persons_min < 0 || c.persons_max < c.persons_min) {
    throw Error(ErrorCode::InvalidConfig, "need 0 <= persons_min <= persons_max");
  }
  SceneConfig s;
  s.non_overlapping = c.non_overlapping;
  return s;
}

std::vector<SceneSample> synthetic_scenes(const RunConfig& c) {
  const SceneConfig scfg = scene_config_of(c);
  const std::uint64_t base = derive_seed(c.seed, 0x5ce4e);
  const auto span = static_cast<std::uint64_t>(c.persons_max - c.persons_min + 1);
  std::vector<SceneSample> out;
  for (int i = 0; i < c.frames; ++i) {
    const std::uint64_t s = derive_seed(base, static_cast<std::uint64_t>(i));
    const int n = c.persons_min + static_cast<int>(s % span);
    out.push_back(generate_scene(n, s, scfg, i));
  }
  return out;
}

// Scene paths from files and directories; a .gdmp input stands for the
// scene next to it.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const std::string& in : inputs) {
    const fs::path p(in);
    if (!fs::exists(p)) throw InputError("input not found: " + in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (p.extension() == ".gdmp") {
      fs::path scene = p;
      scene.replace_extension(".json");
      if (!fs::exists(scene)) throw InputError("scene for maps not found: " + scene.string());
      out.push_back(scene);
    } else {
      out.push_back(p);
    }
  }
  return out;
}

struct Inputs {
  std::vector<SceneSample> scenes;
  std::vector<DenseMaps> maps;  // empty, or one per scene
};

Inputs load_inputs(const RunConfig& c) {
  Inputs in;
  if (c.input.empty()) {
    in.scenes = synthetic_scenes(c);
    return in;
  }
  bool any_gdmp = false;
  for (const auto& s : c.input) any_gdmp = any_gdmp || fs::path(s).extension() == ".gdmp";
  const bool with_maps = c.maps || any_gdmp;
  for (const fs::path& p : expand_inputs(c.input)) {
    in.scenes.push_back(io::read_scene(p));
    if (with_maps) {
      fs::path m = p;
      m.replace_extension(".gdmp");
      if (!fs::exists(m)) throw InputError("maps not found: " + m.string());
      in.maps.push_back(io::read_maps(m));
    }
  }
  return in;
}

// ---------------------------------------------------------------- eval

void write_reports(const EvalReport& report, const fs::path& dir, const std::string& stem) {
  io::write_report(report, dir / (stem + ".csv"), io::ReportFormat::Csv);
  io::write_report(report, dir / (stem + ".txt"), io::ReportFormat::Text);
}

std::string summary_line(const EvalRow& r) {
  return "PCK_rel " + fmt("%.1f", r.pck_rel) + "  PCK_abs " + fmt("%.1f", r.pck_abs) +
         "  PCK_root " + fmt("%.1f", r.pck_root) + "  PCOD " + fmt("%.1f", r.pcod) +
         "  MRPE(mm) " + fmt("%.1f", r.mrpe_x) + "/" + fmt("%.1f", r.mrpe_y) + "/" +
         fmt("%.1f", r.mrpe_z) + "  matched " + std::to_string(r.matched_count) + "/" +
         std::to_string(r.gt_count);
}

struct AblationRow {
  const char* name;
  const char* stem;
  void (*apply)(RunConfig&);
};

const AblationRow kAblationRows[] = {
    {"full", "ablation_full", [](RunConfig&) {}},
    {"w/o offset", "ablation_no_offset", [](RunConfig& c) { c.use_offset = false; }},
    {"w/o heatmap", "ablation_no_heatmap", [](RunConfig& c) { c.use_heatmap = false; }},
    {"w/o adaptive fusion", "ablation_no_fusion", [](RunConfig& c) { c.use_fusion = false; }},
};

int cmd_eval(const RunConfig& c, std::ostream& out) {
  const NoiseModel noise = noise_of(c);
  const PipelineConfig pcfg = pipeline_of(c);
  const Inputs in = load_inputs(c);
  const fs::path dir = ensure_dir(c.out);
  const std::uint64_t seed = derive_seed(c.seed, 0xe7a1);
  const auto* maps = in.maps.empty() ? nullptr : &in.maps;

  const EvalReport report = end_to_end(in.scenes, noise, pcfg, seed, c.workers, maps);
  write_reports(report, dir, "report");
  out << "frames " << report.frames.size() << "\n" << summary_line(report.summary) << "\n";

  // Score the other unmatched-person regime too; only its summary is kept.
  PipelineConfig other_cfg = pcfg;
  other_cfg.eval.include_unmatched = !pcfg.eval.include_unmatched;
  const EvalReport other = end_to_end(in.scenes, noise, other_cfg, seed, c.workers, maps);
  if (!other.frames.empty()) {
    const std::string line = std::string(other.include_unmatched ? "All people" : "Matched") +
                             ": " + summary_line(other.summary) + "\n";
    out << line;
    std::ofstream txt(dir / "report.txt", std::ios::binary | std::ios::app);
    txt << "\nOther regime, " << line;
  }

  if (c.ablation) {
    std::string table =
        "row,pck_rel,pck_abs,pck_root,pcod,mrpe_x,mrpe_y,mrpe_z,matched_count,gt_count\n";
    for (const AblationRow& row : kAblationRows) {
      RunConfig rc = c;
      row.apply(rc);
      const EvalReport r = end_to_end(in.scenes, noise, pipeline_of(rc), seed, c.workers, maps);
      write_reports(r, dir, row.stem);
      // Reuse the report row formatting, swapping the frame id for the row name.
      const std::string csv = io::format_report_csv(r);
      const auto last = csv.rfind("\nall,");
      const std::string cells =
          last == std::string::npos ? ",,,,,,,,0,0\n" : csv.substr(last + 4);
      table += std::string(row.name) + cells;
      out << row.name << ": " << summary_line(r.summary) << "\n";
    }
    io::write_text_file(dir / "ablation.csv", table);
  }
  out << "wrote " << (dir / "report.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- verification

int cmd_gradcheck(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.count <= 0 && c.tangent_cases <= 0) {
    err << "warning: no instances requested; gradient check passes vacuously\n";
    out << "checked 0  skipped 0\nPASS\n";
    return kExitOk;
  }
  auto cases = scene_torso_cases(std::max(0, c.count), c.seed, noise_of(c));
  const auto tangent = tangent_cases(std::max(0, c.tangent_cases), derive_seed(c.seed, 7));
  cases.insert(cases.end(), tangent.begin(), tangent.end());
  const auto s = gradcheck(cases, SkeletonDef::mupots15(), c.fd_step);
  out << "component     worst_error  status\n";
  for (std::size_t p = 0; p < kGradComponents.size(); ++p) {
    std::string name = kGradComponents[p];
    name.resize(12, ' ');
    out << name << "  " << fmt("%.3e", s.worst[p]) << "  "
        << (s.worst[p] < c.tolerance ? "ok" : "FAIL") << "\n";
  }
  out << "checked " << s.checked << "  skipped " << s.skipped_tangent << "\n";
  if (s.skipped_tangent > 0) {
    out << "skipped " << s.skipped_tangent << " near-tangent instance(s): TangentSingularity\n";
  }
  const bool ok = s.max_error() < c.tolerance;
  out << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
  const int forced = std::clamp(c.no_real_root, 0, std::max(0, c.count));
  auto cases = scene_torso_cases(std::max(0, c.count - forced), c.seed, noise_of(c));
  const auto nrr = no_real_root_cases(forced, derive_seed(c.seed, 11));
  cases.insert(cases.end(), nrr.begin(), nrr.end());
  const auto s = closed_form_vs_argmin(cases, SkeletonDef::mupots15());
  out << "checked " << s.checked << "  no_real_root " << s.no_real_root << "  degenerate "
      << s.degenerate << " (excluded)\n";
  out << "max |z_closed - z_numeric| = " << fmt("%.3e", s.max_deviation) << " m\n";
  const bool ok = s.passed(c.tolerance);
  out << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kExitOk : kExitVerificationFailed;
}

// ---------------------------------------------------------------- benchmarks

FusionBenchConfig fusion_config_of(const RunConfig& c, int samples) {
  FusionBenchConfig f;
  f.samples = samples;
  f.noise = noise_of(c);
  f.noise.occlusion_rate = 0.0;
  f.reg = reg_of(c);
  return f;
}

struct DecodeErrors {
  double full = 0, heatmap_only = 0, offset_only = 0;
  long joints = 0;
};

// Mean joint pixel error of the three decoder variants on rendered maps.
DecodeErrors decoder_benchmark(const RunConfig& c) {
  DecodeErrors e;
  const NoiseModel noise = noise_of(c);
  const auto scenes = synthetic_scenes(c);
  const SkeletonDef& skel = SkeletonDef::mupots15();
  for (const SceneSample& base : scenes) {
    const std::uint64_t s = derive_seed(c.seed, static_cast<std::uint64_t>(base.frame_id));
    const SceneSample scene = with_occlusion(base, noise.occlusion_rate, derive_seed(s, 1));
    RenderConfig rc = render_config_for(scene, c.stride);
    rc.offset_pixel_sigma = noise.pixel_sigma;
    rc.seed = derive_seed(s, 2);
    const DenseMaps maps = render_maps(scene, rc);
    DecodeConfig full, heat, off;
    full.threshold = heat.threshold = off.threshold = c.threshold;
    heat.use_offset = false;
    off.use_heatmap = false;
    const auto pf = decode_poses(maps, skel, full);
    const auto ph = decode_poses(maps, skel, heat);
    const auto po = decode_poses(maps, skel, off);
    for (const ScenePerson& person : scene.persons) {
      const Pixel root = project(person.joints.joints[skel.root_index()], scene.cam);
      auto nearest = [&](const std::vector<Pose25D>& poses) -> const Pose25D* {
        const Pose25D* best = nullptr;
        double bd = 1e300;
        for (const auto& p : poses) {
          const auto& r = p.joints[skel.root_index()];
          const double d = std::hypot(r.u - root.u, r.v - root.v);
          if (d < bd) {
            bd = d;
            best = &p;
          }
        }
        return bd < 2.0 * c.stride ? best : nullptr;
      };
      const Pose25D* a = nearest(pf);
      const Pose25D* b = nearest(ph);
      const Pose25D* o = nearest(po);
      if (a == nullptr || b == nullptr || o == nullptr) continue;
      for (int k = 0; k < skel.joint_count(); ++k) {
        const Pixel t = project(person.joints.joints[k], scene.cam);
        auto err = [&](const Pose25D* p) {
          return std::hypot(p->joints[k].u - t.u, p->joints[k].v - t.v);
        };
        e.full += err(a);
        e.heatmap_only += err(b);
        e.offset_only += err(o);
        ++e.joints;
      }
    }
  }
  if (e.joints > 0) {
    e.full /= e.joints;
    e.heatmap_only /= e.joints;
    e.offset_only /= e.joints;
  }
  return e;
}

int cmd_bench(const RunConfig& c, std::ostream& out) {
  const fs::path dir = ensure_dir(c.out);
  const auto t0 = std::chrono::steady_clock::now();
  const auto samples = fusion_benchmark(fusion_config_of(c, c.samples), c.seed);
  const auto t1 = std::chrono::steady_clock::now();
  const auto f = summarize(samples);
  const DecodeErrors d = decoder_benchmark(c);

  std::string csv = "benchmark,variant,mean_abs_error,unit,count\n";
  auto row = [&](const char* b, const char* v, double x, const char* unit, long n) {
    csv += std::string(b) + "," + v + "," + fmt("%.6f", x) + "," + unit + "," +
           std::to_string(n) + "\n";
  };
  row("fusion", "reg", f.mean_abs_reg, "m", static_cast<long>(f.count));
  row("fusion", "geo", f.mean_abs_geo, "m", static_cast<long>(f.count));
  row("fusion", "fused", f.mean_abs_fused, "m", static_cast<long>(f.count));
  row("decoder", "full", d.full, "px", d.joints);
  row("decoder", "heatmap_only", d.heatmap_only, "px", d.joints);
  row("decoder", "offset_only", d.offset_only, "px", d.joints);
  io::write_text_file(dir / "bench.csv", csv);

  const double secs = std::chrono::duration<double>(t1 - t0).count();
  out << "fusion benchmark, " << f.count << " samples\n"
      << "  mean |z - z_true|  reg " << fmt("%.4f", f.mean_abs_reg) << " m  geo "
      << fmt("%.4f", f.mean_abs_geo) << " m  fused " << fmt("%.4f", f.mean_abs_fused) << " m\n"
      << "  " << fmt("%.3f", secs) << " s including scene synthesis\n"
      << "decoder benchmark, " << d.joints << " joints\n"
      << "  mean joint error  full " << fmt("%.3f", d.full) << " px  heatmap only "
      << fmt("%.3f", d.heatmap_only) << " px  offset only " << fmt("%.3f", d.offset_only)
      << " px\n"
      << "wrote " << (dir / "bench.csv").string() << "\n";
  return kExitOk;
}

int cmd_plot(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.samples <= 0) {
    err << "warning: empty benchmark (samples = 0); no figures written\n";
    return kExitOk;
  }
  const fs::path dir = ensure_dir(c.out);
  std::vector<Figure> figs;

  {
    Figure fig{"Depth error vs. pixel noise", "pixel_sigma_px", "mean abs depth error (m)", {}, {}};
    fig.series = {{"reg", {}}, {"geo", {}}, {"fused", {}}};
    for (double px : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      RunConfig rc = c;
      rc.pixel_sigma = px;
      const auto s = summarize(fusion_benchmark(fusion_config_of(rc, c.samples), c.seed));
      fig.x.push_back(px);
      fig.series[0].y.push_back(s.mean_abs_reg);
      fig.series[1].y.push_back(s.mean_abs_geo);
      fig.series[2].y.push_back(s.mean_abs_fused);
    }
    figs.push_back(std::move(fig));
  }
  {
    Figure fig{"Fusion vs. single estimators", "reg_relative_sigma", "mean abs depth error (m)",
               {}, {}};
    fig.series = {{"reg", {}}, {"geo", {}}, {"fused", {}}};
    for (double rel : {0.01, 0.02, 0.05, 0.1, 0.2, 0.3}) {
      RunConfig rc = c;
      rc.reg_sigma_min = rc.reg_sigma_max = rel;
      const auto s = summarize(fusion_benchmark(fusion_config_of(rc, c.samples), c.seed));
      fig.x.push_back(rel);
      fig.series[0].y.push_back(s.mean_abs_reg);
      fig.series[1].y.push_back(s.mean_abs_geo);
      fig.series[2].y.push_back(s.mean_abs_fused);
    }
    figs.push_back(std::move(fig));
  }
  {
    // Consecutive benchmark samples form person pairs; bin them by their
    // true depth gap.
    const auto samples = fusion_benchmark(fusion_config_of(c, c.samples), c.seed);
    const std::vector<double> edges = {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 11.0};
    std::vector<long> correct(edges.size() - 1, 0), total(edges.size() - 1, 0);
    auto ord = [](double a, double b) {
      return std::abs(a - b) < 0.01 ? 0 : (a < b ? -1 : 1);
    };
    for (std::size_t i = 0; i + 1 < samples.size(); i += 2) {
      const auto& a = samples[i];
      const auto& b = samples[i + 1];
      const double gap = std::abs(a.z_true - b.z_true);
      for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        if (gap >= edges[k] && gap < edges[k + 1]) {
          ++total[k];
          if (ord(a.fused.z, b.fused.z) == ord(a.z_true, b.z_true)) ++correct[k];
        }
      }
    }
    Figure fig{"PCOD vs. depth gap", "depth_gap_m", "PCOD (%)", {}, {{"fused", {}}}};
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      fig.x.push_back(0.5 * (edges[k] + edges[k + 1]));
      fig.series[0].y.push_back(total[k] == 0 ? std::nan("")
                                              : 100.0 * correct[k] / static_cast<double>(total[k]));
    }
    figs.push_back(std::move(fig));
  }

  const char* const names[] = {"error_vs_noise", "fusion_vs_single", "pcod_vs_gap"};
  for (std::size_t i = 0; i < figs.size(); ++i) {
    io::write_text_file(dir / (std::string(names[i]) + ".svg"), render_svg(figs[i]));
    io::write_text_file(dir / (std::string(names[i]) + ".csv"), figure_csv(figs[i]));
    out << "wrote " << (dir / names[i]).string() << ".{svg,csv}\n";
  }
  return kExitOk;
}

int cmd_synth_gen(const RunConfig& c, std::ostream& out) {
  const fs::path dir = ensure_dir(c.out);
  const NoiseModel noise = noise_of(c);
  auto scenes = synthetic_scenes(c);
  for (SceneSample& scene : scenes) {
    const std::uint64_t s = derive_seed(c.seed, static_cast<std::uint64_t>(scene.frame_id));
    scene.rng_seed = s;
    if (noise.occlusion_rate > 0.0) scene = with_occlusion(scene, noise.occlusion_rate, s);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06lld", static_cast<long long>(scene.frame_id));
    io::write_scene(dir / (std::string(name) + ".json"), scene);
    if (c.maps) {
      RenderConfig rc = render_config_for(scene, c.stride);
      rc.offset_pixel_sigma = noise.pixel_sigma;
      rc.offset_zrel_sigma = noise.zrel_sigma;
      rc.seed = derive_seed(s, 2);
      io::write_maps(dir / (std::string(name) + ".gdmp"), render_maps(scene, rc));
    }
  }
  out << "wrote " << scenes.size() << " scene(s) to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- driver

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("GEODEPTH_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (errno != 0 || *end != '\0' || *v == '-') {
    throw Error(ErrorCode::InvalidConfig, std::string("GEODEPTH_SEED is not a seed: ") + v);
  }
  return s;
}

// Values from the config file fill options the command line left unset.
void apply_config(CLI::App* sub, const std::string& path) {
  if (!fs::exists(path)) throw InputError("config file not found: " + path);
  for (const auto& [key, value] : parse_config_text(read_text(path))) {
    CLI::Option* opt = sub->get_option_no_throw(flag(key));
    if (opt == nullptr || key == "config") {
      throw Error(ErrorCode::InvalidConfig,
                  path + ": unknown key '" + key + "' for " + sub->get_name());
    }
    if (opt->count() > 0) continue;
    std::vector<std::string> parts;
    if (opt->get_items_expected_max() > 1) {
      std::stringstream ss(value);
      for (std::string item; std::getline(ss, item, ',');) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) parts.push_back(item);
      }
    } else {
      parts.push_back(value);
    }
    opt->clear();
    opt->add_result(parts);
    opt->run_callback();
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  int line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig,
                  "config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    std::replace(key.begin(), key.end(), '-', '_');
    if (key.empty()) {
      throw Error(ErrorCode::InvalidConfig,
                  "config line " + std::to_string(line_no) + ": empty key");
    }
    out.emplace_back(key, value);
  }
  return out;
}

RunConfig subcommand_defaults(const std::string& name) {
  RunConfig c;
  if (name == "gradcheck") {
    c.count = 500;
    c.tolerance = 1e-4;
    c.pixel_sigma = 2.0;
    c.zrel_sigma = 0.02;
  } else if (name == "oracle") {
    c.count = 1000;
    c.tolerance = 1e-6;
    c.pixel_sigma = 2.0;
    c.zrel_sigma = 0.02;
    c.omega_error = 0.05;
  } else if (name == "bench" || name == "plot") {
    c.pixel_sigma = 2.0;
    c.zrel_sigma = 0.02;
    c.omega_error = 0.05;
    c.occlusion_rate = 0.3;
    c.reg_sigma_min = 0.02;
    c.reg_sigma_max = 0.15;
    c.out = "geodepth_bench";
    if (name == "plot") {
      c.samples = 2000;
      c.out = "geodepth_plots";
    }
  } else if (name == "synth-gen") {
    c.frames = 10;
    c.out = "geodepth_scenes";
  } else if (name != "eval") {
    throw Error(ErrorCode::InvalidConfig, "unknown subcommand " + name);
  }
  return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometry-aware multi-person 3D pose reasoning: evaluation and verification"};
  app.name("geodepth");
  app.require_subcommand(1);
  app.fallthrough(false);

  std::uint64_t default_seed = 0;
  try {
    if (const auto s = env_seed()) default_seed = *s;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  struct Sub {
    CLI::App* app;
    std::unique_ptr<RunConfig> cfg;
    std::string config_path;
  };
  std::map<std::string, Sub> subs;
  auto make = [&](const std::string& name, const std::string& help) -> Sub& {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, help);
    s.cfg = std::make_unique<RunConfig>(subcommand_defaults(name));
    s.cfg->seed = default_seed;
    s.app->add_option("--config", s.config_path, "Flat key = value file; flags take precedence");
    return s;
  };

  {
    Sub& s = make("eval", "Decode, reason about depth, fuse, lift and score");
    Registrar r{s.app, *s.cfg};
    r.inputs();
    r.common();
    r.scenes();
    r.noise();
    r.regression();
    r.pipeline();
    r.opt("maps", s.cfg->maps, "Read precomputed maps (<scene>.gdmp) instead of rendering");
    r.opt("ablation", s.cfg->ablation, "Also run one report per ablation row");
  }
  {
    Sub& s = make("gradcheck", "Analytic root-depth gradient vs. central differences");
    Registrar r{s.app, *s.cfg};
    r.common();
    r.noise();
    r.opt("count", s.cfg->count, "Instances from synthetic scenes");
    r.opt("tangent_cases", s.cfg->tangent_cases, "Extra constructed double-root instances");
    r.opt("fd_step", s.cfg->fd_step, "Finite-difference step");
    r.opt("tolerance", s.cfg->tolerance, "Largest accepted relative error");
  }
  {
    Sub& s = make("oracle", "Closed-form root depth vs. numerical argmin");
    Registrar r{s.app, *s.cfg};
    r.common();
    r.noise();
    r.opt("count", s.cfg->count, "Total instances");
    r.opt("no_real_root", s.cfg->no_real_root, "Instances forced to have no real root");
    r.opt("tolerance", s.cfg->tolerance, "Largest accepted deviation (m)");
  }

  {
    Sub& s = make("bench", "Depth fusion and decoder benchmarks");
    Registrar r{s.app, *s.cfg};
    r.common();
    r.opt("out", s.cfg->out, "Output directory");
    r.scenes();
    r.noise();
    r.regression();
    r.opt("samples", s.cfg->samples, "Fusion benchmark samples");
    r.opt("stride", s.cfg->stride, "Output stride of rendered maps (px)");
    r.opt("threshold", s.cfg->threshold, "Heatmap confidence for keeping heatmap positions");
  }
  {
    Sub& s = make("plot", "Benchmark figures as SVG with CSV data twins");
    Registrar r{s.app, *s.cfg};
    r.common();
    r.opt("out", s.cfg->out, "Output directory");
    r.noise();
    r.regression();
    r.opt("samples", s.cfg->samples, "Samples per plotted point");
  }
  {
    Sub& s = make("synth-gen", "Write synthetic scenes (and optionally maps)");
    Registrar r{s.app, *s.cfg};
    r.common();
    r.opt("out", s.cfg->out, "Output directory");
    r.scenes();
    r.noise();
    r.opt("stride", s.cfg->stride, "Output stride of rendered maps (px)");
    r.opt("maps", s.cfg->maps, "Also write rendered maps");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << e.what() << "\n";
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  Sub& sub = subs.at(name);
  try {
    if (!sub.config_path.empty()) apply_config(sub.app, sub.config_path);
    const RunConfig& c = *sub.cfg;
    if (name == "eval") return cmd_eval(c, out);
    if (name == "gradcheck") return cmd_gradcheck(c, out, err);
    if (name == "oracle") return cmd_oracle(c, out);
    if (name == "bench") return cmd_bench(c, out);
    if (name == "plot") return cmd_plot(c, out, err);
    return cmd_synth_gen(c, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const CLI::ParseError& e) {
    err << "error: config: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace geodepth::cli
