#include "disloc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "disloc/confinement.hpp"
#include "disloc/digest.hpp"
#include "disloc/dynamics.hpp"
#include "disloc/parallel.hpp"
#include "disloc/rng.hpp"
#include "disloc/svg.hpp"

namespace disloc {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// collects written files and finishes with a digest manifest
class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
  }
  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out << content;
    out.close();
    entries_.push_back({name, content.size(), sha256_hex(content)});
  }
  void finish(const std::string& status) {
    json m;
    m["status"] = status;
    m["files"] = json::array();
    for (const auto& e : entries_) {
      json f;
      f["name"] = e.name;
      f["bytes"] = e.bytes;
      f["sha256"] = e.sha;
      m["files"].push_back(f);
    }
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << m.dump(2) << "\n";
  }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    out.push_back("manifest.json");
    return out;
  }

 private:
  struct Entry {
    std::string name;
    std::size_t bytes;
    std::string sha;
  };
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
};

// manifest for whatever actually reached the disk (partial-result path)
void write_manifest_from_dir(const std::string& dir, const std::string& status) {
  namespace fs = std::filesystem;
  json m;
  m["status"] = status;
  m["files"] = json::array();
  if (fs::exists(dir)) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().filename() != "manifest.json")
        names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    for (const auto& name : names) {
      std::ifstream in(fs::path(dir) / name, std::ios::binary);
      std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      json f;
      f["name"] = name;
      f["bytes"] = content.size();
      f["sha256"] = sha256_hex(content);
      m["files"].push_back(f);
    }
  }
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
  out << m.dump(2) << "\n";
}

ExecutionPolicy policy_for(const ExperimentConfig& c) {
  return c.threads == 1 ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel;
}

GreensOptions greens_options(const ExperimentConfig& c) {
  GreensOptions g;
  g.nystrom_points = c.solver.nystrom_points;
  g.assembly_policy = policy_for(c);
  return g;
}

std::vector<Vec2> domain_outline(const Domain& dom) {
  std::vector<Vec2> pts;
  if (!dom.bounded()) return pts;
  const auto& curve = dom.curve();
  for (int i = 0; i <= 512; ++i) pts.push_back(curve.point(kTwoPi * i / 512));
  return pts;
}

const char* event_kind_name(const Event& e) {
  if (std::holds_alternative<BoundaryHit>(e.kind)) return "boundary_hit";
  if (std::holds_alternative<DipoleCollision>(e.kind)) return "dipole_collision";
  return "annihilation";
}

json event_to_json(const Event& e) {
  json out;
  out["kind"] = event_kind_name(e);
  out["time"] = e.time;
  out["time_uncertainty"] = e.time_uncertainty;
  if (const auto* bh = std::get_if<BoundaryHit>(&e.kind)) {
    out["index"] = bh->index;
    out["point"] = {bh->where.s.x, bh->where.s.y};
  } else if (const auto* dc = std::get_if<DipoleCollision>(&e.kind)) {
    out["pair"] = {dc->i, dc->j};
    out["point"] = {dc->location.x, dc->location.y};
  } else if (const auto* an = std::get_if<Annihilation>(&e.kind)) {
    out["pair"] = {an->i, an->j};
  }
  return out;
}

std::string trajectory_csv(const std::vector<const Trajectory*>& trajs, int stride_cfg) {
  std::string csv = "run_id,t,i,x,y,b\n";
  for (std::size_t run = 0; run < trajs.size(); ++run) {
    const Trajectory& tr = *trajs[run];
    const int n = static_cast<int>(tr.burgers.size());
    const int stride =
        stride_cfg > 0 ? stride_cfg : std::max<int>(1, static_cast<int>(tr.times.size()) / 40);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      if (k % stride != 0 && k + 1 != tr.times.size()) continue;
      for (int i = 0; i < n; ++i) {
        const Vec2 p = tr.positions[k][i];
        if (!std::isfinite(p.x)) continue;
        csv += std::to_string(run) + "," + fmt(tr.times[k]) + "," + std::to_string(i) + "," +
               fmt(p.x) + "," + fmt(p.y) + "," + std::to_string(tr.burgers[i]) + "\n";
      }
    }
  }
  return csv;
}

std::string events_csv(const std::vector<const Trajectory*>& trajs) {
  std::string csv = "run_id,kind,time,time_uncertainty,index_i,index_j,x,y\n";
  for (std::size_t run = 0; run < trajs.size(); ++run) {
    for (const Event& e : trajs[run]->events) {
      std::string ii = "", jj = "", px = "", py = "";
      if (const auto* bh = std::get_if<BoundaryHit>(&e.kind)) {
        ii = std::to_string(bh->index);
        px = fmt(bh->where.s.x);
        py = fmt(bh->where.s.y);
      } else if (const auto* dc = std::get_if<DipoleCollision>(&e.kind)) {
        ii = std::to_string(dc->i);
        jj = std::to_string(dc->j);
        px = fmt(dc->location.x);
        py = fmt(dc->location.y);
      } else if (const auto* an = std::get_if<Annihilation>(&e.kind)) {
        ii = std::to_string(an->i);
        jj = std::to_string(an->j);
      }
      csv += std::to_string(run) + "," + event_kind_name(e) + "," + fmt(e.time) + "," +
             fmt(e.time_uncertainty) + "," + ii + "," + jj + "," + px + "," + py + "\n";
    }
  }
  return csv;
}

std::vector<Vec2> subsample_path(const Trajectory& tr, int dislocation, int max_pts) {
  std::vector<Vec2> pts;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const Vec2 p = tr.positions[k][dislocation];
    if (std::isfinite(p.x)) pts.push_back(p);
  }
  if (static_cast<int>(pts.size()) <= max_pts) return pts;
  std::vector<Vec2> out;
  const double step = static_cast<double>(pts.size() - 1) / (max_pts - 1);
  for (int i = 0; i < max_pts; ++i) out.push_back(pts[static_cast<std::size_t>(i * step)]);
  return out;
}

std::string superposition_svg(const Domain& dom, const std::vector<const Trajectory*>& trajs,
                              int max_runs) {
  const Vec2 lo = dom.bbox_lo() - Vec2{0.1, 0.1};
  const Vec2 hi = dom.bbox_hi() + Vec2{0.1, 0.1};
  SvgCanvas svg(lo, hi, 720);
  svg.closed_path(domain_outline(dom), "#222", 1.5);
  const int count = std::min<int>(max_runs, static_cast<int>(trajs.size()));
  const double opacity = std::clamp(30.0 / std::max(1, count), 0.02, 0.8);
  for (int run = 0; run < count; ++run) {
    const Trajectory& tr = *trajs[run];
    for (std::size_t i = 0; i < tr.burgers.size(); ++i) {
      const char* color = tr.burgers[i] > 0 ? "#d62728" : "#1f77b4";
      svg.polyline(subsample_path(tr, static_cast<int>(i), 120), color, 0.8, opacity);
    }
  }
  return svg.str();
}

json solver_diagnostics(const GreensEvaluator& kernels) {
  json out;
  out["kernel_source"] = kernels.analytic() ? "analytic-image" : "nystrom";
  if (!kernels.analytic()) {
    out["nystrom_points"] = kernels.nystrom()->points();
    out["resolve_distance"] = kernels.nystrom()->resolve_distance();
  }
  return out;
}

json integrator_echo(const IntegrateOptions& o) {
  json out;
  out["rel_tol"] = o.rel_tol;
  out["abs_tol"] = o.abs_tol;
  out["event_time_tolerance"] = o.event_time_tolerance;
  out["on_collision"] = o.on_collision == CollisionPolicy::Stop ? "stop" : "annihilate";
  return out;
}

}  // namespace

Vec2 find_equilibrium(const GreensEvaluator& kernels, double force_tol) {
  const Domain& dom = kernels.domain();
  if (!dom.bounded())
    throw Error(ErrorCode::EquilibriumNotFound, "equilibrium search needs a bounded domain");
  auto force = [&](Vec2 z) {
    DislocationSystem s{{z}, {1}};
    return peach_koehler(kernels, s).f[0];
  };

  // coarse scan for the smallest |f|
  const Vec2 lo = dom.bbox_lo(), hi = dom.bbox_hi();
  Vec2 best{};
  double best_norm = kInf;
  const int g = 21;
  for (int i = 1; i < g; ++i) {
    for (int j = 1; j < g; ++j) {
      const Vec2 p{lo.x + (hi.x - lo.x) * i / g, lo.y + (hi.y - lo.y) * j / g};
      if (!dom.contains(p) || dom.boundary_distance(p) < 0.1 * dom.rho_bar()) continue;
      const double fn = force(p).norm();
      if (fn < best_norm) {
        best_norm = fn;
        best = p;
      }
    }
  }
  if (!std::isfinite(best_norm))
    throw Error(ErrorCode::EquilibriumNotFound, "no admissible interior scan point");

  // damped Newton with finite-difference Jacobian
  Vec2 z = best;
  const double fd = 1e-6 * std::max(1.0, dom.diameter());
  for (int it = 0; it < 80; ++it) {
    const Vec2 f = force(z);
    if (f.norm() < force_tol) return z;
    const Vec2 fx = (force(z + Vec2{fd, 0}) - force(z - Vec2{fd, 0})) / (2 * fd);
    const Vec2 fy = (force(z + Vec2{0, fd}) - force(z - Vec2{0, fd})) / (2 * fd);
    const double det = fx.x * fy.y - fy.x * fx.y;
    if (std::abs(det) < 1e-300) break;
    Vec2 dz{(-f.x * fy.y + f.y * fy.x) / det, (-fx.x * f.y + fx.y * f.x) / det};
    const double max_step = 0.25 * dom.rho_bar();
    if (dz.norm() > max_step) dz = dz * (max_step / dz.norm());
    Vec2 zn = z + dz;
    for (int back = 0; back < 30 && (!dom.contains(zn) || force(zn).norm() > f.norm()); ++back)
      zn = z + (zn - z) * 0.5;
    if (dist(zn, z) < 1e-15) break;
    z = zn;
  }
  if (force(z).norm() < force_tol) return z;
  throw Error(ErrorCode::EquilibriumNotFound, "force-norm minimization did not converge");
}

RunOutput run_simulate(const ExperimentConfig& config) {
  OutputDir out(config.output_dir);
  RunOutput res;
  const Domain dom = domain_from_spec(config.domain_spec);
  GreensEvaluator kernels(dom, greens_options(config));
  if (config.simulate.positions.empty())
    throw Error(ErrorCode::InvalidConfig, "simulate needs at least one dislocation");
  DislocationSystem sys{config.simulate.positions, config.simulate.burgers};

  Trajectory traj = integrate(kernels, sys, config.simulate.t_max, config.integrator);
  std::vector<const Trajectory*> one{&traj};
  out.write("trajectory.csv", trajectory_csv(one, 1));
  out.write("events.csv", events_csv(one));
  if (config.simulate.svg && dom.bounded())
    out.write("trajectory.svg", superposition_svg(dom, one, 1));

  json s;
  s["experiment"] = "simulate";
  s["domain"] = config.domain_spec;
  s["t_max"] = config.simulate.t_max;
  s["accepted_steps"] = traj.accepted_steps;
  s["rejected_steps"] = traj.rejected_steps;
  s["force_evaluations"] = traj.force_evaluations;
  s["boundary_hit_radius"] = traj.boundary_hit_radius;
  s["pair_hit_radius"] = traj.pair_hit_radius;
  s["events"] = json::array();
  for (const Event& e : traj.events) s["events"].push_back(event_to_json(e));
  s["terminated_by_event"] = traj.terminated_by_event();
  if (!traj.energies.empty()) {
    s["energy_initial"] = traj.energies.front();
    s["energy_final"] = traj.energies.back();
  }
  s["solver"] = solver_diagnostics(kernels);
  s["integrator"] = integrator_echo(config.integrator);
  res.summary_json = s.dump(2) + "\n";
  out.write("summary.json", res.summary_json);
  out.finish("complete");
  res.files = out.names();
  return res;
}

RunOutput run_montecarlo(const ExperimentConfig& config) {
  OutputDir out(config.output_dir);
  RunOutput res;
  const Domain dom = domain_from_spec(config.domain_spec);
  if (dom.kind() != DomainKind::UnitDisk)
    throw Error(ErrorCode::InvalidConfig, "the Monte Carlo scenario runs on the unit disk");
  GreensEvaluator kernels(dom, greens_options(config));
  const MonteCarloConfig& mc = config.montecarlo;

  // initial conditions in D_{2,delta,gamma}, z1 near the boundary, b = (+1,-1)
  SampleStats stats;
  RegionD region{2, mc.delta, mc.gamma};
  const auto configs = sample_interior(dom, region, mc.runs, config.seed, &stats);

  std::vector<Trajectory> trajs(mc.runs);
  std::vector<std::string> failures(std::max(mc.runs, 1));
  parallel_for(mc.runs, policy_for(config), config.threads, [&](std::int64_t r) {
    DislocationSystem sys{configs[r], {+1, -1}};
    try {
      trajs[r] = integrate(kernels, sys, mc.t_max, config.integrator);
    } catch (const Error& e) {
      failures[r] = e.what();
    }
  });
  for (int r = 0; r < mc.runs; ++r)
    if (!failures[r].empty())
      throw Error(ErrorCode::StiffnessBudgetExceeded,
                  "run " + std::to_string(r) + " failed: " + failures[r]);

  std::vector<const Trajectory*> ptrs;
  for (const auto& t : trajs) ptrs.push_back(&t);

  long terminated = 0, boundary = 0, dipole = 0;
  std::vector<double> hit_times, first_times;
  for (const auto& t : trajs) {
    if (!t.terminated_by_event()) continue;
    ++terminated;
    const Event& e = t.events.back();
    first_times.push_back(e.time);
    if (std::holds_alternative<BoundaryHit>(e.kind)) {
      ++boundary;
      hit_times.push_back(e.time);
    } else {
      ++dipole;
    }
  }

  out.write("trajectories.csv", trajectory_csv(ptrs, mc.trajectory_stride));
  out.write("events.csv", events_csv(ptrs));

  // histogram of boundary hitting times
  std::vector<double> edges;
  std::vector<long> counts;
  const double t_hi = hit_times.empty() ? 1.0 : *std::max_element(hit_times.begin(), hit_times.end());
  for (int i = 0; i <= mc.bins; ++i) edges.push_back(t_hi * i / mc.bins);
  counts.assign(mc.bins, 0);
  for (double t : hit_times) {
    int b = std::min(static_cast<int>(t / t_hi * mc.bins), mc.bins - 1);
    ++counts[std::max(b, 0)];
  }
  std::string hist = "bin_lo,bin_hi,count\n";
  for (int i = 0; i < mc.bins; ++i)
    hist += fmt(edges[i]) + "," + fmt(edges[i + 1]) + "," + std::to_string(counts[i]) + "\n";
  out.write("histogram.csv", hist);
  out.write("histogram.svg", histogram_svg(edges, counts, "boundary hitting times"));
  out.write("superposition.svg", superposition_svg(dom, ptrs, mc.svg_max_runs));

  auto mean_of = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto median_of = [](std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };

  json s;
  s["experiment"] = "montecarlo";
  s["domain"] = config.domain_spec;
  s["runs"] = mc.runs;
  s["seed"] = config.seed;
  s["region"] = {{"delta", mc.delta}, {"gamma", mc.gamma}};
  s["sampling"] = {{"attempts", stats.attempts}, {"acceptance_rate", stats.acceptance_rate}};
  s["terminated"] = terminated;
  s["all_terminated"] = terminated == mc.runs;
  s["first_event"] = {{"boundary_hits", boundary},
                      {"dipole_collisions", dipole},
                      {"boundary_fraction", mc.runs ? static_cast<double>(boundary) / mc.runs : 0.0},
                      {"dipole_fraction", mc.runs ? static_cast<double>(dipole) / mc.runs : 0.0}};
  s["hitting_times"] = {{"count", hit_times.size()},
                        {"mean", mean_of(hit_times)},
                        {"median", median_of(hit_times)},
                        {"max", t_hi}};
  s["first_event_times"] = {{"mean", mean_of(first_times)}, {"median", median_of(first_times)}};
  const double bound = kTwoPi * mc.delta * mc.delta;
  s["theorem2"] = {{"delta0", mc.delta},
                   {"leading_order_bound", bound},
                   {"mean_hit_over_bound", hit_times.empty() ? 0.0 : mean_of(hit_times) / bound}};
  if (mc.runs > 0) {
    s["hit_radii"] = {{"boundary", trajs[0].boundary_hit_radius},
                      {"pair", trajs[0].pair_hit_radius}};
  }
  s["solver"] = solver_diagnostics(kernels);
  s["integrator"] = integrator_echo(config.integrator);
  res.summary_json = s.dump(2) + "\n";
  out.write("summary.json", res.summary_json);
  out.finish("complete");
  res.files = out.names();
  return res;
}

RunOutput run_cardioid(const ExperimentConfig& config) {
  OutputDir out(config.output_dir);
  RunOutput res;
  // the cardioid scenario defaults to the smoothed variant
  const std::string spec =
      config.domain_spec == "unit-disk" ? "cardioid-smooth" : config.domain_spec;
  const Domain dom = domain_from_spec(spec);
  if (!dom.bounded()) throw Error(ErrorCode::InvalidConfig, "cardioid run needs a bounded domain");
  GreensOptions gopt = greens_options(config);
  gopt.cache_densities = false;  // every integration step queries a fresh point
  GreensEvaluator kernels(dom, gopt);
  const CardioidConfig& cc = config.cardioid;

  const Vec2 eq = find_equilibrium(kernels);
  if (dom.boundary_distance(eq) <= cc.start_radius)
    throw Error(ErrorCode::EquilibriumNotFound, "start circle leaves the domain");

  std::vector<Trajectory> trajs(cc.runs);
  std::vector<double> angles(cc.runs, std::nan(""));
  std::vector<std::string> failures(std::max(cc.runs, 1));
  parallel_for(cc.runs, policy_for(config), config.threads, [&](std::int64_t r) {
    const double phi = kTwoPi * r / std::max(cc.runs, 1);
    DislocationSystem sys{{eq + cc.start_radius * Vec2{std::cos(phi), std::sin(phi)}}, {1}};
    try {
      trajs[r] = integrate(kernels, sys, cc.t_max, config.integrator);
      if (trajs[r].terminated_by_event())
        angles[r] = incidence_angle_deg(dom, trajs[r], trajs[r].events.size() - 1);
    } catch (const Error& e) {
      failures[r] = e.what();
    }
  });
  for (int r = 0; r < cc.runs; ++r)
    if (!failures[r].empty())
      throw Error(ErrorCode::StiffnessBudgetExceeded,
                  "run " + std::to_string(r) + " failed: " + failures[r]);

  std::vector<const Trajectory*> ptrs;
  for (const auto& t : trajs) ptrs.push_back(&t);
  out.write("trajectories.csv", trajectory_csv(ptrs, 0));

  std::string ang = "run_id,start_x,start_y,hit_time,angle_deg,hit_x,hit_y\n";
  int hits = 0, above = 0;
  double max_angle = 0.0;
  for (int r = 0; r < cc.runs; ++r) {
    const Trajectory& t = trajs[r];
    if (!t.terminated_by_event() || !std::holds_alternative<BoundaryHit>(t.events.back().kind))
      continue;
    const auto& bh = std::get<BoundaryHit>(t.events.back().kind);
    ++hits;
    if (angles[r] > cc.angle_threshold_deg) ++above;
    max_angle = std::max(max_angle, angles[r]);
    const Vec2 start = t.positions.front()[0];
    ang += std::to_string(r) + "," + fmt(start.x) + "," + fmt(start.y) + "," +
           fmt(t.events.back().time) + "," + fmt(angles[r]) + "," + fmt(bh.where.s.x) + "," +
           fmt(bh.where.s.y) + "\n";
  }
  out.write("angles.csv", ang);

  // overlay with the start circle marked
  {
    const Vec2 lo = dom.bbox_lo() - Vec2{0.1, 0.1};
    const Vec2 hi = dom.bbox_hi() + Vec2{0.1, 0.1};
    SvgCanvas svg(lo, hi, 720);
    svg.closed_path(domain_outline(dom), "#222", 1.5);
    svg.circle(eq, cc.start_radius, "#999", 1.0);
    for (const auto& t : trajs) svg.polyline(subsample_path(t, 0, 200), "#d62728", 0.9, 0.55);
    out.write("cardioid.svg", svg.str());
  }

  json s;
  s["experiment"] = "cardioid";
  s["domain"] = spec;
  s["runs"] = cc.runs;
  s["equilibrium"] = {eq.x, eq.y};
  s["start_radius"] = cc.start_radius;
  s["boundary_hits"] = hits;
  s["angle_threshold_deg"] = cc.angle_threshold_deg;
  s["angles_above_threshold"] = above;
  s["max_angle_deg"] = max_angle;
  s["rho_bar"] = dom.rho_bar();
  if (cc.runs > 0) s["boundary_hit_radius"] = trajs[0].boundary_hit_radius;
  s["solver"] = solver_diagnostics(kernels);
  s["integrator"] = integrator_echo(config.integrator);
  res.summary_json = s.dump(2) + "\n";
  out.write("summary.json", res.summary_json);
  out.finish("complete");
  res.files = out.names();
  return res;
}

namespace {

BoundaryDatum datum_from_config(const Domain& dom, const ConfinementConfig& cc) {
  if (cc.datum == "uniform") return BoundaryDatum::uniform(dom);
  if (cc.datum.rfind("shifted-vortex:", 0) == 0) {
    const std::string rest = cc.datum.substr(15);
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::InvalidConfig, "shifted-vortex datum needs x,y");
    return BoundaryDatum::shifted_vortex(
        dom, {std::stod(rest.substr(0, comma)), std::stod(rest.substr(comma + 1))});
  }
  if (cc.datum == "fourier") return BoundaryDatum::fourier(dom, cc.datum_cos, cc.datum_sin);
  throw Error(ErrorCode::InvalidConfig, "unknown datum spec: " + cc.datum);
}

}  // namespace

RunOutput run_confinement(const ExperimentConfig& config) {
  OutputDir out(config.output_dir);
  RunOutput res;
  const Domain dom = domain_from_spec(config.domain_spec);
  const ConfinementConfig& cc = config.confinement;
  const BoundaryDatum datum = datum_from_config(dom, cc);

  MinimizeOptions mopt;
  mopt.grid = cc.grid;
  const MinimizeResult min = minimize_F(dom, datum, mopt);

  std::string grid_csv = "x,y,F\n";
  double g_lo = kInf, g_hi = -kInf;
  for (std::size_t i = 0; i < min.grid_points.size(); ++i) {
    grid_csv += fmt(min.grid_points[i].x) + "," + fmt(min.grid_points[i].y) + "," +
                fmt(min.grid_values[i]) + "\n";
    g_lo = std::min(g_lo, min.grid_values[i]);
    g_hi = std::max(g_hi, min.grid_values[i]);
  }
  out.write("F_grid.csv", grid_csv);

  // heatmap
  {
    const Vec2 lo = dom.bbox_lo() - Vec2{0.05, 0.05};
    const Vec2 hi = dom.bbox_hi() + Vec2{0.05, 0.05};
    SvgCanvas svg(lo, hi, 720);
    const double cell_x = (dom.bbox_hi().x - dom.bbox_lo().x) / cc.grid / 2.0;
    const double cell_y = (dom.bbox_hi().y - dom.bbox_lo().y) / cc.grid / 2.0;
    for (std::size_t i = 0; i < min.grid_points.size(); ++i) {
      const double u = g_hi > g_lo ? (min.grid_values[i] - g_lo) / (g_hi - g_lo) : 0.0;
      char color[10];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", static_cast<int>(30 + 225 * u),
                    static_cast<int>(60 + 60 * (1 - u)), static_cast<int>(200 * (1 - u) + 30));
      const Vec2 p = min.grid_points[i];
      svg.rect_world({p.x - cell_x, p.y - cell_y}, {p.x + cell_x, p.y + cell_y}, color);
    }
    svg.closed_path(domain_outline(dom), "#222", 1.5);
    svg.circle(min.a_min, 0.015 * dom.diameter(), "#000", 1.5, "#fff");
    out.write("heatmap.svg", svg.str());
  }

  const auto rows = epsilon_convergence_study(dom, datum, cc.probes, cc.epsilons, {},
                                              policy_for(config));
  std::string conv = "probe_x,probe_y,eps,F_eps,F_limit,abs_gap\n";
  for (const auto& r : rows)
    conv += fmt(r.a.x) + "," + fmt(r.a.y) + "," + fmt(r.eps) + "," + fmt(r.F_eps) + "," +
            fmt(r.F_limit) + "," + fmt(r.gap) + "\n";
  out.write("eps_convergence.csv", conv);

  json s;
  s["experiment"] = "confinement";
  s["domain"] = config.domain_spec;
  s["datum"] = cc.datum;
  s["minimizer"] = {{"a", {min.a_min.x, min.a_min.y}},
                    {"F", min.F_min},
                    {"interior_distance", min.interior_distance},
                    {"certified_margin", min.certified_margin},
                    {"grid", cc.grid},
                    {"grid_evaluations", min.grid_evaluations}};

  if (cc.per_eps_minimizers) {
    json pem = json::array();
    for (double eps : cc.epsilons) {
      double best = kInf;
      Vec2 best_p{};
      const Vec2 lo = dom.bbox_lo(), hi = dom.bbox_hi();
      for (int i = 0; i < cc.minimizer_grid; ++i) {
        for (int j = 0; j < cc.minimizer_grid; ++j) {
          const Vec2 p{lo.x + (hi.x - lo.x) * (i + 0.5) / cc.minimizer_grid,
                       lo.y + (hi.y - lo.y) * (j + 0.5) / cc.minimizer_grid};
          if (!dom.contains(p) || dom.boundary_distance(p) <= 2.0 * eps) continue;
          ConfinementOptions co;
          co.quad_tol = 1e-6;
          const auto r = regularized_E_eps(dom, datum, p, eps, co);
          if (*r.E_eps < best) {
            best = *r.E_eps;
            best_p = p;
          }
        }
      }
      pem.push_back({{"eps", eps},
                     {"a_eps", {best_p.x, best_p.y}},
                     {"E_eps", best},
                     {"interior_distance", dom.boundary_distance(best_p)},
                     {"distance_to_limit_minimizer", dist(best_p, min.a_min)}});
    }
    s["per_eps_minimizers"] = pem;
  }
  res.summary_json = s.dump(2) + "\n";
  out.write("summary.json", res.summary_json);
  out.finish("complete");
  res.files = out.names();
  return res;
}

RunOutput run_greens_probe(const ExperimentConfig& config) {
  OutputDir out(config.output_dir);
  RunOutput res;
  const Domain dom = domain_from_spec(config.domain_spec);
  GreensOptions gopt = greens_options(config);
  if (config.greens_probe.method == "analytic") gopt.method = KernelMethod::Analytic;
  if (config.greens_probe.method == "numeric") gopt.method = KernelMethod::Numeric;
  GreensEvaluator kernels(dom, gopt);

  std::string csv = "kind,x1,y1,x2,y2,value,grad_x,grad_y,source,error_estimate\n";
  for (const auto& pt : config.greens_probe.points) {
    const Vec2 x{pt[0], pt[1]}, y{pt[2], pt[3]};
    for (const std::string& kind : config.greens_probe.kinds) {
      KernelEvaluation e;
      if (kind == "k") e = kernels.k(x, y);
      else if (kind == "h") e = kernels.h(x);
      else e = kernels.green(x, y);
      csv += kind + "," + fmt(x.x) + "," + fmt(x.y) + "," + fmt(y.x) + "," + fmt(y.y) + "," +
             fmt(e.value) + "," + fmt(e.gradient_x.x) + "," + fmt(e.gradient_x.y) + "," +
             (e.source == KernelSource::AnalyticImage ? "analytic" : "numeric") + "," +
             fmt(e.error_estimate) + "\n";
    }
  }
  out.write("greens_probe.csv", csv);
  json s;
  s["experiment"] = "greens-probe";
  s["domain"] = config.domain_spec;
  s["points"] = config.greens_probe.points.size();
  s["solver"] = solver_diagnostics(kernels);
  res.summary_json = s.dump(2) + "\n";
  out.write("summary.json", res.summary_json);
  out.finish("complete");
  res.files = out.names();
  res.stdout_text = csv;
  return res;
}

RunOutput run_experiment(const ExperimentConfig& config) {
  try {
    switch (config.kind) {
      case ExperimentKind::Simulate: return run_simulate(config);
      case ExperimentKind::MonteCarlo: return run_montecarlo(config);
      case ExperimentKind::Cardioid: return run_cardioid(config);
      case ExperimentKind::Confinement: return run_confinement(config);
      case ExperimentKind::GreensProbe: return run_greens_probe(config);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidConfig)
      write_manifest_from_dir(config.output_dir, "partial");
    throw;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown experiment kind");
}

}  // namespace disloc
