#pragma once

#include <string>
#include <vector>

#include "disloc/config.hpp"
#include "disloc/greens.hpp"

namespace disloc {

struct RunOutput {
  std::vector<std::string> files;  // names written inside the output directory
  std::string summary_json;
  std::string stdout_text;  // printed by the CLI (greens-probe records)
};

// dispatch on config.kind; writes data files, summary.json and manifest.json
// into config.output_dir. On a numerical failure the manifest is still
// flushed with status "partial" before the error propagates.
RunOutput run_experiment(const ExperimentConfig& config);

RunOutput run_simulate(const ExperimentConfig& config);
RunOutput run_montecarlo(const ExperimentConfig& config);
RunOutput run_cardioid(const ExperimentConfig& config);
RunOutput run_confinement(const ExperimentConfig& config);
RunOutput run_greens_probe(const ExperimentConfig& config);

// zero of the Peach-Koehler force for a single dislocation (n = 1); grid scan
// followed by damped Newton with a finite-difference Jacobian
Vec2 find_equilibrium(const GreensEvaluator& kernels, double force_tol = 1e-9);

}  // namespace disloc
