#include "lde/run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lde {

using nlohmann::json;

namespace {

json to_json_obj(const RunConfig& c) {
  json j;
  j["L_list"] = c.L_list;
  j["L"] = c.L;
  j["theta"] = c.theta;
  j["J"] = c.J;
  j["J_p"] = c.J_p;
  j["omega"] = c.omega;
  j["backend"] = c.backend;
  j["T"] = c.T;
  j["T_min"] = c.T_min;
  j["T_max"] = c.T_max;
  j["T_points"] = c.T_points;
  j["theta_min"] = c.theta_min;
  j["theta_max"] = c.theta_max;
  j["theta_points"] = c.theta_points;
  j["n_bar"] = c.n_bar;
  j["gamma"] = c.gamma;
  j["t_max"] = c.t_max;
  j["t_points"] = c.t_points;
  if (c.j_eff_override) j["j_eff"] = *c.j_eff_override;
  j["output"] = c.output;
  j["cache_dir"] = c.cache_dir;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["ode_tol"] = c.ode_tol;
  j["timestamp"] = c.timestamp;
  return j;
}

}  // namespace

std::string RunConfig::to_json() const { return to_json_obj(*this).dump(); }

RunConfig RunConfig::from_json(const std::string& text) {
  json j = json::parse(text);
  RunConfig c;
  const auto opt = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  opt("L_list", c.L_list);
  opt("L", c.L);
  opt("theta", c.theta);
  opt("J", c.J);
  opt("J_p", c.J_p);
  opt("omega", c.omega);
  opt("backend", c.backend);
  opt("T", c.T);
  opt("T_min", c.T_min);
  opt("T_max", c.T_max);
  opt("T_points", c.T_points);
  opt("theta_min", c.theta_min);
  opt("theta_max", c.theta_max);
  opt("theta_points", c.theta_points);
  opt("n_bar", c.n_bar);
  opt("gamma", c.gamma);
  opt("t_max", c.t_max);
  opt("t_points", c.t_points);
  if (j.contains("j_eff")) c.j_eff_override = j.at("j_eff").get<double>();
  opt("output", c.output);
  opt("cache_dir", c.cache_dir);
  opt("seed", c.seed);
  opt("threads", c.threads);
  opt("ode_tol", c.ode_tol);
  opt("timestamp", c.timestamp);
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return from_json(ss.str());
}

}  // namespace lde
