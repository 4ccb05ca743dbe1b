#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace geodepth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Everything a subcommand can be configured with. Field names double as
/// config-file keys and, with '_' spelled '-', as long flags.
struct RunConfig {
  std::vector<std::string> input;
  std::string out = "geodepth_out";
  std::uint64_t seed = 0;
  int workers = 1;

  // synthetic scenes
  int frames = 100;
  int persons_min = 1;
  int persons_max = 4;
  bool non_overlapping = true;

  // noise model
  double pixel_sigma = 0.0;
  double zrel_sigma = 0.0;
  double omega_error = 0.0;
  double occlusion_rate = 0.0;
  double reg_sigma_min = 0.0;
  double reg_sigma_max = 0.0;
  bool reg_honest = true;

  // pipeline
  bool use_heatmap = true;
  bool use_offset = true;
  bool use_geo = true;
  bool use_reg = true;
  bool use_fusion = true;
  bool known_omega = true;
  double omega = 0.5;
  int stride = 4;
  double threshold = 0.3;
  double nms_radius = 12.0;
  double tangent_eps = 1e-8;

  // metrics
  double pck_threshold = 0.15;
  double match_threshold = 40.0;
  bool include_unmatched = true;
  bool ablation = false;

  // verification and benchmarks
  int count = 0;
  int no_real_root = 50;
  int tangent_cases = 0;
  double fd_step = 1e-5;  // matches kFdStep
  double tolerance = 0.0;
  int samples = 10000;
  bool maps = false;
};

/// RunConfig as each subcommand starts out before config file and flags.
/// Throws InvalidConfig for an unknown name.
RunConfig subcommand_defaults(const std::string& name);

/// Runs one invocation; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Flat "key = value" lines; '#' starts a comment. Throws InvalidConfig.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

}  // namespace geodepth::cli
