#include "disloc/config.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace disloc {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

double num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) bad(std::string(key) + " must be a number");
  return j[key].get<double>();
}

int integer(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) bad(std::string(key) + " must be an integer");
  return j[key].get<int>();
}

std::vector<Vec2> point_list(const json& j) {
  std::vector<Vec2> out;
  if (!j.is_array()) bad("expected an array of [x, y] pairs");
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) bad("expected [x, y] pairs");
    out.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return out;
}

}  // namespace

const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::MonteCarlo: return "montecarlo";
    case ExperimentKind::Cardioid: return "cardioid";
    case ExperimentKind::Confinement: return "confinement";
    case ExperimentKind::GreensProbe: return "greens-probe";
  }
  return "?";
}

std::optional<ExperimentKind> experiment_from_name(const std::string& name) {
  for (ExperimentKind k : {ExperimentKind::Simulate, ExperimentKind::MonteCarlo,
                           ExperimentKind::Cardioid, ExperimentKind::Confinement,
                           ExperimentKind::GreensProbe})
    if (name == experiment_name(k)) return k;
  return std::nullopt;
}

Domain domain_from_spec(const std::string& spec) {
  if (spec == "unit-disk" || spec == "disk") return Domain::unit_disk();
  if (spec == "half-plane") return Domain::half_plane();
  if (spec == "plane" || spec == "full-plane") return Domain::full_plane();
  if (spec == "cardioid") return Domain::parametric(FourierCurve::cardioid());
  if (spec.rfind("cardioid-smooth", 0) == 0) {
    double beta = 0.32;
    if (spec.size() > 16 && spec[15] == ':') beta = std::stod(spec.substr(16));
    return Domain::parametric(FourierCurve::smoothed_cardioid(beta));
  }
  if (spec.rfind("ellipse:", 0) == 0) {
    const std::string rest = spec.substr(8);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) bad("ellipse spec must be ellipse:a,b");
    return Domain::parametric(FourierCurve::ellipse(std::stod(rest.substr(0, comma)),
                                                    std::stod(rest.substr(comma + 1))));
  }
  if (spec.rfind("fourier:", 0) == 0) {
    json j = json::parse(spec.substr(8), nullptr, false);
    if (j.is_discarded()) bad("fourier domain spec is not valid JSON");
    auto coeffs = [&](const char* key) {
      std::vector<double> v;
      if (j.contains(key))
        for (const auto& e : j[key]) v.push_back(e.get<double>());
      return v;
    };
    return Domain::parametric(
        FourierCurve(coeffs("x_cos"), coeffs("x_sin"), coeffs("y_cos"), coeffs("y_sin")));
  }
  bad("unknown domain spec: " + spec);
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) bad("config is not valid JSON");
  if (!j.is_object()) bad("config must be a JSON object");

  ExperimentConfig c;
  if (j.contains("experiment")) {
    const auto k = experiment_from_name(j["experiment"].get<std::string>());
    if (!k) bad("unknown experiment: " + j["experiment"].get<std::string>());
    c.kind = *k;
    c.kind_specified = true;
  }
  if (j.contains("domain")) {
    if (j["domain"].is_string()) {
      c.domain_spec = j["domain"].get<std::string>();
    } else if (j["domain"].is_object()) {
      c.domain_spec = "fourier:" + j["domain"].dump();
    } else {
      bad("domain must be a string or a fourier object");
    }
  }
  // validate the domain spec eagerly so malformed configs fail before any run
  (void)domain_from_spec(c.domain_spec);

  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  c.threads = integer(j, "threads", 0);

  if (j.contains("integrator")) {
    const json& ji = j["integrator"];
    c.integrator.rel_tol = num(ji, "rel_tol", c.integrator.rel_tol);
    c.integrator.abs_tol = num(ji, "abs_tol", c.integrator.abs_tol);
    c.integrator.event_time_tolerance =
        num(ji, "event_time_tolerance", c.integrator.event_time_tolerance);
    c.integrator.boundary_hit_radius =
        num(ji, "boundary_hit_radius", c.integrator.boundary_hit_radius);
    c.integrator.pair_hit_radius = num(ji, "pair_hit_radius", c.integrator.pair_hit_radius);
    c.integrator.min_step = num(ji, "min_step", c.integrator.min_step);
    if (ji.contains("on_collision")) {
      const std::string v = ji["on_collision"].get<std::string>();
      if (v == "stop") c.integrator.on_collision = CollisionPolicy::Stop;
      else if (v == "annihilate") c.integrator.on_collision = CollisionPolicy::Annihilate;
      else bad("on_collision must be stop or annihilate");
    }
  }
  if (j.contains("solver")) {
    c.solver.nystrom_points = integer(j["solver"], "nystrom_points", c.solver.nystrom_points);
    c.solver.tolerance = num(j["solver"], "tolerance", c.solver.tolerance);
    if (c.solver.nystrom_points < 64 || c.solver.nystrom_points > 16384)
      bad("nystrom_points out of range");
  }

  if (j.contains("simulate")) {
    const json& js = j["simulate"];
    if (js.contains("positions")) c.simulate.positions = point_list(js["positions"]);
    if (js.contains("burgers")) {
      c.simulate.burgers.clear();
      for (const auto& e : js["burgers"]) c.simulate.burgers.push_back(e.get<int>());
    }
    c.simulate.t_max = num(js, "t_max", c.simulate.t_max);
    if (js.contains("svg")) c.simulate.svg = js["svg"].get<bool>();
    if (c.simulate.positions.size() != c.simulate.burgers.size())
      bad("simulate.positions and simulate.burgers must have equal length");
  }
  if (j.contains("montecarlo")) {
    const json& jm = j["montecarlo"];
    c.montecarlo.runs = integer(jm, "runs", c.montecarlo.runs);
    c.montecarlo.delta = num(jm, "delta", c.montecarlo.delta);
    c.montecarlo.gamma = num(jm, "gamma", c.montecarlo.gamma);
    c.montecarlo.bins = integer(jm, "bins", c.montecarlo.bins);
    c.montecarlo.t_max = num(jm, "t_max", c.montecarlo.t_max);
    c.montecarlo.trajectory_stride = integer(jm, "trajectory_stride", 0);
    c.montecarlo.svg_max_runs = integer(jm, "svg_max_runs", c.montecarlo.svg_max_runs);
    if (c.montecarlo.runs < 0) bad("montecarlo.runs must be nonnegative");
    if (c.montecarlo.bins < 1) bad("montecarlo.bins must be positive");
  }
  if (j.contains("cardioid")) {
    const json& jc = j["cardioid"];
    c.cardioid.runs = integer(jc, "runs", c.cardioid.runs);
    c.cardioid.start_radius = num(jc, "start_radius", c.cardioid.start_radius);
    c.cardioid.angle_threshold_deg = num(jc, "angle_threshold_deg", c.cardioid.angle_threshold_deg);
    c.cardioid.t_max = num(jc, "t_max", c.cardioid.t_max);
  }
  if (j.contains("confinement")) {
    const json& jc = j["confinement"];
    if (jc.contains("datum")) {
      if (jc["datum"].is_string()) {
        c.confinement.datum = jc["datum"].get<std::string>();
      } else if (jc["datum"].is_object()) {
        c.confinement.datum = "fourier";
        for (const auto& e : jc["datum"].value("cos", json::array()))
          c.confinement.datum_cos.push_back(e.get<double>());
        for (const auto& e : jc["datum"].value("sin", json::array()))
          c.confinement.datum_sin.push_back(e.get<double>());
      } else {
        bad("confinement.datum must be a string or fourier object");
      }
    }
    c.confinement.grid = integer(jc, "grid", c.confinement.grid);
    if (jc.contains("probes")) c.confinement.probes = point_list(jc["probes"]);
    if (jc.contains("epsilons")) {
      c.confinement.epsilons.clear();
      for (const auto& e : jc["epsilons"]) c.confinement.epsilons.push_back(e.get<double>());
    }
    if (jc.contains("per_eps_minimizers"))
      c.confinement.per_eps_minimizers = jc["per_eps_minimizers"].get<bool>();
    c.confinement.minimizer_grid = integer(jc, "minimizer_grid", c.confinement.minimizer_grid);
  }
  if (j.contains("greens_probe")) {
    const json& jg = j["greens_probe"];
    if (jg.contains("kinds")) {
      c.greens_probe.kinds.clear();
      for (const auto& e : jg["kinds"]) {
        const std::string k = e.get<std::string>();
        if (k != "k" && k != "h" && k != "green") bad("greens_probe kind must be k, h or green");
        c.greens_probe.kinds.push_back(k);
      }
    }
    if (jg.contains("points")) {
      for (const auto& e : jg["points"]) {
        if (!e.is_array() || (e.size() != 4 && e.size() != 2)) bad("probe points need 2 or 4 numbers");
        std::array<double, 4> pt{0, 0, 0, 0};
        for (std::size_t i = 0; i < e.size(); ++i) pt[i] = e[i].get<double>();
        c.greens_probe.points.push_back(pt);
      }
    }
    if (jg.contains("method")) {
      c.greens_probe.method = jg["method"].get<std::string>();
      if (c.greens_probe.method != "auto" && c.greens_probe.method != "analytic" &&
          c.greens_probe.method != "numeric")
        bad("greens_probe.method must be auto, analytic or numeric");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace disloc
