#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "disloc/digest.hpp"
#include "disloc/experiments.hpp"

using namespace disloc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("disloc_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config parsing validates and defaults") {
  const auto cfg = parse_config(R"({"experiment":"montecarlo","domain":"unit-disk",
    "seed": 9, "montecarlo": {"runs": 3, "bins": 10}})");
  CHECK(cfg.kind == ExperimentKind::MonteCarlo);
  CHECK(cfg.seed == 9);
  CHECK(cfg.montecarlo.runs == 3);
  CHECK(cfg.montecarlo.delta == 0.2);

  CHECK_THROWS_AS(parse_config("not json"), Error);
  CHECK_THROWS_AS(parse_config(R"({"domain":"hexagon"})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"experiment":"dance"})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"montecarlo":{"runs":-2}})"), Error);
}

TEST_CASE("domain specs cover the named curves") {
  CHECK(domain_from_spec("unit-disk").kind() == DomainKind::UnitDisk);
  CHECK(domain_from_spec("half-plane").kind() == DomainKind::HalfPlane);
  CHECK(domain_from_spec("plane").kind() == DomainKind::FullPlane);
  CHECK(domain_from_spec("ellipse:2,1").kind() == DomainKind::Parametric);
  CHECK(domain_from_spec("cardioid").cusp_flagged());
  CHECK(!domain_from_spec("cardioid-smooth:0.3").cusp_flagged());
  const Domain four = domain_from_spec(R"(fourier:{"x_cos":[0,1.5],"y_sin":[0,1.0]})");
  CHECK(four.kind() == DomainKind::Parametric);
}

TEST_CASE("simulate experiment writes trajectory, events, summary and manifest") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Simulate;
  cfg.domain_spec = "unit-disk";
  cfg.simulate.positions = {{0.8, 0.0}};
  cfg.simulate.burgers = {1};
  cfg.simulate.t_max = 5.0;
  const auto dir = fresh_dir("simulate");
  cfg.output_dir = dir.string();
  const auto out = run_experiment(cfg);
  CHECK(fs::exists(dir / "trajectory.csv"));
  CHECK(fs::exists(dir / "events.csv"));
  CHECK(fs::exists(dir / "trajectory.svg"));
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(out.summary_json.find("boundary_hit") != std::string::npos);
  CHECK(out.summary_json.find("0.271") != std::string::npos);  // hit time near 0.27108
}

TEST_CASE("montecarlo experiment: termination, reproducibility, manifest digests") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::MonteCarlo;
  cfg.domain_spec = "unit-disk";
  cfg.seed = 1;
  cfg.montecarlo.runs = 40;
  cfg.montecarlo.bins = 10;
  const auto dir1 = fresh_dir("mc1");
  cfg.output_dir = dir1.string();
  const auto out1 = run_experiment(cfg);
  CHECK(out1.summary_json.find("\"all_terminated\": true") != std::string::npos);
  CHECK(fs::exists(dir1 / "histogram.csv"));
  CHECK(fs::exists(dir1 / "superposition.svg"));

  // byte-identical rerun
  const auto dir2 = fresh_dir("mc2");
  cfg.output_dir = dir2.string();
  run_experiment(cfg);
  for (const char* name : {"trajectories.csv", "events.csv", "histogram.csv",
                           "superposition.svg", "histogram.svg", "summary.json"})
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));

  // manifest digests match the files on disk
  const std::string manifest = slurp(dir1 / "manifest.json");
  for (const char* name : {"trajectories.csv", "summary.json"}) {
    const std::string digest = sha256_hex(slurp(dir1 / name));
    CHECK(manifest.find(digest) != std::string::npos);
  }
}

TEST_CASE("montecarlo with zero runs writes empty outputs and a valid manifest") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::MonteCarlo;
  cfg.domain_spec = "unit-disk";
  cfg.montecarlo.runs = 0;
  const auto dir = fresh_dir("mc0");
  cfg.output_dir = dir.string();
  const auto out = run_experiment(cfg);
  CHECK(fs::exists(dir / "manifest.json"));
  const std::string traj = slurp(dir / "trajectories.csv");
  CHECK(traj == "run_id,t,i,x,y,b\n");
  CHECK(out.summary_json.find("\"runs\": 0") != std::string::npos);
}

TEST_CASE("montecarlo rejects non-disk domains") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::MonteCarlo;
  cfg.domain_spec = "ellipse:2,1";
  cfg.output_dir = fresh_dir("mcbad").string();
  CHECK_THROWS_AS(run_experiment(cfg), Error);
}

TEST_CASE("greens-probe emits delimiter-separated records") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::GreensProbe;
  cfg.domain_spec = "unit-disk";
  cfg.greens_probe.points = {{0.6, 0.0, 0.0, 0.0}};
  const auto dir = fresh_dir("probe");
  cfg.output_dir = dir.string();
  const auto out = run_experiment(cfg);
  CHECK(out.stdout_text.find("kind,x1,y1,x2,y2,value,grad_x,grad_y,source,error_estimate") == 0);
  // h(0.6, 0) = log(0.64)/2pi = -0.0710288...
  CHECK(out.stdout_text.find("-0.07102879") != std::string::npos);
  CHECK(out.stdout_text.find("analytic") != std::string::npos);
}

TEST_CASE("cardioid experiment: equilibrium start stays put, axis start stays on axis") {
  // equilibrium of the smoothed cardioid via the library entry point
  const Domain dom = domain_from_spec("cardioid-smooth:0.32");
  GreensOptions gopt;
  gopt.nystrom_points = 512;
  GreensEvaluator kernels(dom, gopt);
  const Vec2 eq = find_equilibrium(kernels);
  CHECK(std::abs(eq.y) <= 1e-6);  // the curve is symmetric about the x axis
  DislocationSystem at_eq{{eq}, {1}};
  CHECK(peach_koehler(kernels, at_eq).f[0].norm() <= 1e-8);

  // no motion from the equilibrium
  const Trajectory still = integrate(kernels, at_eq, 0.5);
  CHECK(!still.terminated_by_event());
  CHECK(dist(still.positions.back()[0], eq) <= 1e-6);

  // a start on the symmetry axis stays on the axis
  const Trajectory axis = integrate(kernels, {{eq + Vec2{0.1, 0.0}}, {1}}, 20.0);
  REQUIRE(axis.terminated_by_event());
  for (std::size_t k = 0; k < axis.times.size(); k += 9)
    CHECK(std::abs(axis.positions[k][0].y) <= 1e-7);
}
