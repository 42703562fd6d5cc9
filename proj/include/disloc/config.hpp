#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "disloc/dynamics.hpp"
#include "disloc/geometry.hpp"

namespace disloc {

enum class ExperimentKind { Simulate, MonteCarlo, Cardioid, Confinement, GreensProbe };

struct SimulateConfig {
  std::vector<Vec2> positions;
  std::vector<int> burgers;
  double t_max = 10.0;
  bool svg = true;
};

struct MonteCarloConfig {
  int runs = 5000;
  double delta = 0.2;
  double gamma = 0.5;
  int bins = 50;
  double t_max = 50.0;
  int trajectory_stride = 0;  // 0: choose automatically (~40 samples per run)
  int svg_max_runs = 5000;
};

struct CardioidConfig {
  int runs = 80;
  double start_radius = 0.1;
  double angle_threshold_deg = 5.0;
  double t_max = 40.0;
};

struct ConfinementConfig {
  std::string datum = "uniform";  // "uniform" | "shifted-vortex:x,y" | "fourier:..."
  std::vector<double> datum_cos, datum_sin;
  int grid = 64;
  std::vector<Vec2> probes = {{0.2, 0.0}, {0.4, 0.0}, {0.6, 0.0}};
  std::vector<double> epsilons = {0.1, 0.05, 0.025, 0.0125};
  bool per_eps_minimizers = false;
  int minimizer_grid = 9;
};

struct GreensProbeConfig {
  std::vector<std::string> kinds = {"k", "h", "green"};
  std::vector<std::array<double, 4>> points;  // x1 y1 x2 y2 (y ignored for h)
  std::string method = "auto";                // auto | analytic | numeric
};

struct SolverConfig {
  int nystrom_points = 1024;
  double tolerance = 0.0;  // 0: per-domain default
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Simulate;
  bool kind_specified = false;
  std::string domain_spec = "unit-disk";
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int threads = 0;  // 0: all available
  IntegrateOptions integrator;
  SolverConfig solver;
  SimulateConfig simulate;
  MonteCarloConfig montecarlo;
  CardioidConfig cardioid;
  ConfinementConfig confinement;
  GreensProbeConfig greens_probe;
};

// parse + schema-validate a JSON config file; throws Error(InvalidConfig)
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// build a Domain from its config spec ("unit-disk", "half-plane", "plane",
// "ellipse:a,b", "cardioid", "cardioid-smooth[:beta]", "fourier:{...}")
Domain domain_from_spec(const std::string& spec);

const char* experiment_name(ExperimentKind k);
std::optional<ExperimentKind> experiment_from_name(const std::string& name);

}  // namespace disloc
