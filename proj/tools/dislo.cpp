#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "disloc/experiments.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_override;
  long long seed_override = -1;
  int threads_override = -1;
};

int run(disloc::ExperimentKind kind, const CommonArgs& args) {
  using disloc::Error;
  using disloc::ErrorCode;
  try {
    disloc::ExperimentConfig config = disloc::load_config(args.config_path);
    if (!config.kind_specified) config.kind = kind;
    if (config.kind != kind)
      throw Error(ErrorCode::InvalidConfig, "config experiment does not match the subcommand");
    if (!args.out_override.empty()) config.output_dir = args.out_override;
    if (args.seed_override >= 0) config.seed = static_cast<std::uint64_t>(args.seed_override);
    if (args.threads_override >= 0) config.threads = args.threads_override;
    const disloc::RunOutput out = disloc::run_experiment(config);
    if (!out.stdout_text.empty()) std::fputs(out.stdout_text.c_str(), stdout);
    std::fprintf(stderr, "wrote %zu files to %s\n", out.files.size(), config.output_dir.c_str());
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::InvalidConfig ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"screw-dislocation dynamics and confinement laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", args.config_path, "JSON experiment config")->required();
    sub->add_option("--out", args.out_override, "override the output directory");
    sub->add_option("--seed", args.seed_override, "override the RNG seed");
    sub->add_option("--threads", args.threads_override, "worker thread count (0 = all)");
  };

  struct Sub {
    const char* name;
    const char* desc;
    disloc::ExperimentKind kind;
  };
  const Sub subs[] = {
      {"simulate", "integrate one configured dislocation system", disloc::ExperimentKind::Simulate},
      {"montecarlo", "trajectory ensemble in the unit disk", disloc::ExperimentKind::MonteCarlo},
      {"cardioid", "80-trajectory cardioid scenario", disloc::ExperimentKind::Cardioid},
      {"confinement", "limit functional, eps study and minimizer", disloc::ExperimentKind::Confinement},
      {"greens-probe", "print kernel values at probe points", disloc::ExperimentKind::GreensProbe},
  };
  for (const Sub& s : subs) add_common(app.add_subcommand(s.name, s.desc));

  CLI11_PARSE(app, argc, argv);

  for (const Sub& s : subs)
    if (app.get_subcommand(s.name)->parsed()) return run(s.kind, args);
  return 2;
}
