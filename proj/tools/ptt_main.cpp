#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ptt/config.hpp"
#include "ptt/error.hpp"
#include "ptt/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral PTT viscoelastic flow simulator"};
  std::string scenario;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<long long> seed;
  std::optional<long long> n;
  std::optional<std::string> dt;
  std::optional<std::string> t_max;
  bool quiet = false;
  app.add_option("scenario", scenario, "blowup, global, linear or verify")->required();
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--n", n, "grid points per axis");
  app.add_option("--dt", dt, "time step");
  app.add_option("--t-max", t_max, "final time");
  app.add_flag("-q,--quiet", quiet, "suppress progress lines");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ptt::kExitConfigError;
  }

  ptt::ScenarioConfig cfg;
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ptt::ConfigError("--config", 0, "cannot read " + config_path);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    auto entries = ptt::parse_config_entries(text);
    entries["scenario"] = {scenario, 0};
    if (out_dir) entries["output_dir"] = {*out_dir, 0};
    if (seed) entries["seed"] = {std::to_string(*seed), 0};
    if (n) entries["n"] = {std::to_string(*n), 0};
    if (dt) entries["dt"] = {*dt, 0};
    if (t_max) entries["t_max"] = {*t_max, 0};
    cfg = ptt::build_config(entries);
  } catch (const ptt::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return ptt::kExitConfigError;
  }

  const auto result = ptt::run_scenario(cfg, quiet ? nullptr : &std::cout);
  for (const auto& c : result.checks) {
    if (!c.passed && c.asserted) std::cerr << "FAIL " << c.name << ' ' << c.detail << '\n';
  }
  if (!result.error.empty()) std::cerr << "error: " << result.error << '\n';
  return result.exit_code;
}
