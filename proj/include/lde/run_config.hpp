#pragma once

// Experiment configuration shared by the CLI subcommands. Fully serializable
// to and from JSON; the resolved form is echoed into every output header.

#include <optional>
#include <string>
#include <vector>

namespace lde {

struct RunConfig {
  // chain / coupling
  std::vector<int> L_list = {4, 6, 8, 10};
  int L = 10;                 // single-chain commands
  double theta = 0.0;
  double J = 1.0;
  double J_p = 0.1;
  double omega = 0.0;
  std::string backend = "resolvent";  // "full" or "resolvent"

  // temperatures
  double T = 0.1;
  double T_min = 0.02, T_max = 0.3;
  int T_points = 15;
  double theta_min = -0.05, theta_max = 0.05;
  int theta_points = 11;

  // reservoir + time grid
  double n_bar = 1.0;
  double gamma = 0.1;
  double t_max = 10.0;
  int t_points = 201;
  std::optional<double> j_eff_override;  // skip the chain computation

  // plumbing
  std::string output;      // empty = stdout
  std::string cache_dir;   // empty = no spectrum cache
  unsigned seed = 20240901;
  int threads = 0;         // 0 = hardware concurrency
  double ode_tol = 1e-10;
  bool timestamp = false;  // embed a timestamp header line

  std::string to_json() const;
  static RunConfig from_json_file(const std::string& path);
  static RunConfig from_json(const std::string& text);
};

}  // namespace lde
