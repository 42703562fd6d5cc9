#include "disloc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace disloc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// embedded error weights (b - bhat)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output coefficients
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

using State = std::vector<Vec2>;

State axpy(const State& y, double h, const State& k) {
  State r = y;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += h * k[i];
  return r;
}

struct ActiveSystem {
  std::vector<Vec2> z;       // active positions
  std::vector<int> b;        // active moduli
  std::vector<int> slot;     // active index -> original slot
};

struct DenseSegment {
  double t0 = 0.0, h = 0.0;
  State r1, r2, r3, r4, r5;

  State at(double t) const {
    const double th = (t - t0) / h;
    State out = r1;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Vec2 v = r2[i] + (1.0 - th) * (r3[i] + th * (r4[i] + (1.0 - th) * r5[i]));
      out[i] += th * v;
    }
    return out;
  }
};

class Rhs {
 public:
  Rhs(const GreensEvaluator& kernels, const std::vector<int>& b)
      : kernels_(&kernels), sys_{{}, b} {}

  bool eval(const State& z, State& out) {
    ++count_;
    sys_.z = z;
    for (const Vec2& p : z)
      if (!kernels_->domain().contains(p)) return false;
    for (std::size_t i = 0; i < z.size(); ++i)
      for (std::size_t j = i + 1; j < z.size(); ++j)
        if (dist(z[i], z[j]) < 1e-13) return false;
    const ForceReport rep = peach_koehler(*kernels_, sys_);
    out = rep.f;
    for (const Vec2& f : out)
      if (!std::isfinite(f.x) || !std::isfinite(f.y)) return false;
    return true;
  }

  std::uint64_t count() const { return count_; }

 private:
  const GreensEvaluator* kernels_;
  DislocationSystem sys_;
  std::uint64_t count_ = 0;
};

struct EventSpec {
  enum class Type { Boundary, Pair } type = Type::Boundary;
  int i = 0, j = 0;
  double threshold = 0.0;
};

double event_value(const EventSpec& ev, const Domain& dom, const State& z) {
  if (ev.type == EventSpec::Type::Boundary)
    return dom.boundary_distance(z[ev.i]) - ev.threshold;
  return dist(z[ev.i], z[ev.j]) - ev.threshold;
}

double min_event_scale(const std::vector<EventSpec>& events, const Domain& dom, const State& z) {
  double m = kInf;
  for (const auto& ev : events) {
    const double v = event_value(ev, dom, z) + ev.threshold;
    m = std::min(m, v);
  }
  return m;
}

double wrms_error(const State& err, const State& y0, const State& y1, double atol, double rtol) {
  double s = 0.0;
  const std::size_t n = err.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double sx = atol + rtol * std::max(std::abs(y0[i].x), std::abs(y1[i].x));
    const double sy = atol + rtol * std::max(std::abs(y0[i].y), std::abs(y1[i].y));
    s += (err[i].x / sx) * (err[i].x / sx) + (err[i].y / sy) * (err[i].y / sy);
  }
  return std::sqrt(s / (2.0 * n));
}

}  // namespace

Trajectory integrate(const GreensEvaluator& kernels, const DislocationSystem& initial,
                     double t_max, const IntegrateOptions& options) {
  const Domain& dom = kernels.domain();
  try {
    validate_system(dom, initial);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidInitial, e.what());
  }
  if (!(t_max > 0.0)) throw Error(ErrorCode::InvalidInitial, "t_max must be positive");

  const int n0 = initial.size();
  Trajectory traj;
  traj.burgers = initial.b;

  // hit thresholds
  double eps_bnd = options.boundary_hit_radius;
  if (eps_bnd <= 0.0 && dom.has_boundary()) {
    double scale = dom.rho_bar();
    if (!std::isfinite(scale)) {
      scale = kInf;
      for (const Vec2& p : initial.z) scale = std::min(scale, dom.boundary_distance(p));
    }
    eps_bnd = 1e-4 * scale;
    if (dom.kind() == DomainKind::Parametric && !kernels.analytic())
      eps_bnd = std::max(eps_bnd, kernels.nystrom()->resolve_distance());
  }
  double eps_pair = options.pair_hit_radius;
  if (eps_pair <= 0.0) {
    double scale = dom.diameter();
    if (!std::isfinite(scale)) {
      scale = 0.0;
      for (int i = 0; i < n0; ++i)
        for (int j = i + 1; j < n0; ++j) scale = std::max(scale, dist(initial.z[i], initial.z[j]));
      if (scale == 0.0) scale = 1.0;
    }
    eps_pair = 1e-4 * scale;
  }
  traj.boundary_hit_radius = eps_bnd;
  traj.pair_hit_radius = eps_pair;


  const bool record_energy = options.record_energy && kernels.analytic();

  ActiveSystem act{initial.z, initial.b, {}};
  act.slot.resize(n0);
  for (int i = 0; i < n0; ++i) act.slot[i] = i;

  Rhs rhs(kernels, act.b);

  auto build_events = [&](const ActiveSystem& a) {
    std::vector<EventSpec> evs;
    if (dom.has_boundary())
      for (std::size_t i = 0; i < a.z.size(); ++i)
        evs.push_back({EventSpec::Type::Boundary, static_cast<int>(i), 0, eps_bnd});
    for (std::size_t i = 0; i < a.z.size(); ++i)
      for (std::size_t j = i + 1; j < a.z.size(); ++j)
        if (a.b[i] * a.b[j] < 0)
          evs.push_back({EventSpec::Type::Pair, static_cast<int>(i), static_cast<int>(j), eps_pair});
    return evs;
  };

  auto record = [&](double t, const State& z, const State& v) {
    traj.times.push_back(t);
    std::vector<Vec2> pos(n0, Vec2{std::nan(""), std::nan("")});
    std::vector<Vec2> vel(n0, Vec2{std::nan(""), std::nan("")});
    for (std::size_t i = 0; i < act.slot.size(); ++i) {
      pos[act.slot[i]] = z[i];
      vel[act.slot[i]] = v[i];
    }
    traj.positions.push_back(std::move(pos));
    traj.velocities.push_back(std::move(vel));
    if (record_energy) {
      DislocationSystem s{z, act.b};
      traj.energies.push_back(renormalized_energy(kernels, s));
    }
  };

  std::vector<EventSpec> events = build_events(act);
  State z = act.z;
  State k1(z.size());
  if (!rhs.eval(z, k1)) throw Error(ErrorCode::InvalidInitial, "force evaluation failed at t=0");
  record(0.0, z, k1);

  // a configuration already below a hit threshold certifies immediately, with
  // the whole collision time supplied by the near-field extrapolation
  for (const EventSpec& ev : events) {
    if (event_value(ev, dom, z) > 0.0) continue;
    Event e;
    if (ev.type == EventSpec::Type::Boundary) {
      const ClosestPoint cp = dom.closest_boundary_point(z[ev.i]);
      e.kind = BoundaryHit{act.slot[ev.i], cp.bp};
      e.time = kTwoPi * cp.dist * cp.dist;
      e.time_uncertainty = kTwoPi * cp.dist * cp.dist * cp.dist;
    } else {
      const double s = dist(z[ev.i], z[ev.j]);
      e.kind = DipoleCollision{act.slot[ev.i], act.slot[ev.j], 0.5 * (z[ev.i] + z[ev.j])};
      e.time = 0.5 * kPi * s * s;
      e.time_uncertainty = kPi * s * s * s;
    }
    e.terminal = true;
    traj.events.push_back(e);
    traj.force_evaluations += rhs.count();
    return traj;
  }

  double t = 0.0;
  double h = std::min(options.initial_step, t_max);
  double err_prev = 1.0;
  const double safety = 0.9, fac_min = 0.2, fac_max = 5.0;
  const double alpha = 0.7 / 5.0, beta = 0.4 / 5.0;

  State k2, k3, k4, k5, k6, k7, z_new, err;

  while (t < t_max) {
    if (traj.accepted_steps + traj.rejected_steps > options.max_steps)
      throw Error(ErrorCode::StiffnessBudgetExceeded, "step budget exhausted");

    // keep steps below the local collision time scale so events are not jumped
    const double scale = min_event_scale(events, dom, z);
    if (std::isfinite(scale)) h = std::min(h, std::max(options.min_step, 0.3 * kPi * scale * scale));
    h = std::min(h, t_max - t);

    bool ok = true;
    ok = ok && rhs.eval(axpy(z, h * a21, k1), k2);
    if (ok) {
      State s = z;
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += h * (a31 * k1[i] + a32 * k2[i]);
      ok = rhs.eval(s, k3);
    }
    if (ok) {
      State s = z;
      for (std::size_t i = 0; i < s.size(); ++i)
        s[i] += h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      ok = rhs.eval(s, k4);
    }
    if (ok) {
      State s = z;
      for (std::size_t i = 0; i < s.size(); ++i)
        s[i] += h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      ok = rhs.eval(s, k5);
    }
    if (ok) {
      State s = z;
      for (std::size_t i = 0; i < s.size(); ++i)
        s[i] += h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      ok = rhs.eval(s, k6);
    }
    if (ok) {
      z_new = z;
      for (std::size_t i = 0; i < z.size(); ++i)
        z_new[i] += h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      ok = rhs.eval(z_new, k7);  // FSAL stage
    }

    double err_norm = kInf;
    if (ok) {
      err.assign(z.size(), Vec2{});
      for (std::size_t i = 0; i < z.size(); ++i)
        err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err_norm = wrms_error(err, z, z_new, options.abs_tol, options.rel_tol);
    }

    if (!ok || err_norm > 1.0) {
      ++traj.rejected_steps;
      const double fac = ok ? std::max(fac_min, safety * std::pow(err_norm, -0.2)) : 0.3;
      h *= fac;
      if (h < options.min_step)
        throw Error(ErrorCode::StiffnessBudgetExceeded,
                    "step control pushed the step below min_step");
      continue;
    }

    // dense output for this step
    DenseSegment seg;
    seg.t0 = t;
    seg.h = h;
    seg.r1 = z;
    seg.r2.resize(z.size());
    seg.r3.resize(z.size());
    seg.r4.resize(z.size());
    seg.r5.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      const Vec2 ydiff = z_new[i] - z[i];
      const Vec2 bspl = h * k1[i] - ydiff;
      seg.r2[i] = ydiff;
      seg.r3[i] = bspl;
      seg.r4[i] = ydiff - h * k7[i] - bspl;
      seg.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }

    // event detection on the accepted step
    int hit_idx = -1;
    double hit_time = kInf;
    for (std::size_t e = 0; e < events.size(); ++e) {
      const double g1 = event_value(events[e], dom, z_new);
      if (g1 >= 0.0) continue;
      // bisection on the dense output
      double lo = t, hi = t + h;
      for (int it = 0; it < 200 && hi - lo > options.event_time_tolerance; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = event_value(events[e], dom, seg.at(mid));
        if (gm > 0.0) lo = mid; else hi = mid;
      }
      const double te = 0.5 * (lo + hi);
      if (te < hit_time) {
        hit_time = te;
        hit_idx = static_cast<int>(e);
      }
    }

    ++traj.accepted_steps;

    if (hit_idx >= 0) {
      const EventSpec& ev = events[hit_idx];
      const State z_ev = seg.at(hit_time);
      State v_ev(z_ev.size());
      rhs.eval(z_ev, v_ev);
      record(hit_time, z_ev, v_ev);

      if (ev.type == EventSpec::Type::Boundary) {
        const ClosestPoint cp = dom.closest_boundary_point(z_ev[ev.i]);
        // remaining time from the hit threshold, to leading order 2 pi d^2
        const double d_end = cp.dist;
        Event e;
        e.kind = BoundaryHit{act.slot[ev.i], cp.bp};
        e.time = hit_time + kTwoPi * d_end * d_end;
        e.time_uncertainty = kTwoPi * d_end * d_end * d_end + options.event_time_tolerance;
        e.terminal = true;
        traj.events.push_back(e);
        traj.force_evaluations += rhs.count();
        return traj;
      }

      // pair event
      const double s_end = dist(z_ev[ev.i], z_ev[ev.j]);
      const Vec2 mid = 0.5 * (z_ev[ev.i] + z_ev[ev.j]);
      Event e;
      e.kind = DipoleCollision{act.slot[ev.i], act.slot[ev.j], mid};
      e.time = hit_time + 0.5 * kPi * s_end * s_end;
      e.time_uncertainty = kPi * s_end * s_end * s_end + options.event_time_tolerance;
      e.terminal = options.on_collision == CollisionPolicy::Stop;
      traj.events.push_back(e);

      if (options.on_collision == CollisionPolicy::Stop) {
        traj.force_evaluations += rhs.count();
        return traj;
      }

      // annihilate the pair and continue with the remaining dislocations
      Event ann;
      ann.kind = Annihilation{act.slot[ev.i], act.slot[ev.j]};
      ann.time = e.time;
      ann.terminal = false;
      traj.events.push_back(ann);
      ActiveSystem next;
      for (std::size_t i = 0; i < act.z.size(); ++i) {
        if (static_cast<int>(i) == ev.i || static_cast<int>(i) == ev.j) continue;
        next.z.push_back(z_ev[i]);
        next.b.push_back(act.b[i]);
        next.slot.push_back(act.slot[i]);
      }
      act = std::move(next);
      traj.force_evaluations += rhs.count();
      if (act.z.empty()) return traj;
      rhs = Rhs(kernels, act.b);
      events = build_events(act);
      z = act.z;
      t = hit_time;
      k1.resize(z.size());
      if (!rhs.eval(z, k1))
        throw Error(ErrorCode::StiffnessBudgetExceeded, "force evaluation failed after annihilation");
      h = options.initial_step;
      err_prev = 1.0;
      continue;
    }

    // plain accepted step
    t += h;
    z = z_new;
    act.z = z;
    k1 = k7;  // FSAL
    record(t, z, k1);
    const double fac =
        std::clamp(safety * std::pow(std::max(err_norm, 1e-10), -alpha) * std::pow(err_prev, beta),
                   fac_min, fac_max);
    err_prev = std::max(err_norm, 1e-10);
    h *= fac;
  }

  traj.force_evaluations += rhs.count();
  return traj;
}

Trajectory integrate(const Domain& domain, const DislocationSystem& initial, double t_max,
                     const IntegrateOptions& options) {
  GreensEvaluator kernels(domain);
  return integrate(kernels, initial, t_max, options);
}

BoundPrediction predict_theorem2(const GreensEvaluator& kernels, const DislocationSystem& initial,
                                 double delta0, double gamma0, const IntegrateOptions& options) {
  const Domain& dom = kernels.domain();
  const RegionCheck rc = in_region_D(dom, initial.z, delta0, gamma0);
  if (!rc.member)
    throw Error(ErrorCode::NotInRegime, "initial configuration is not in D_{n,delta0,gamma0}");

  BoundPrediction bp;
  bp.kind = BoundPrediction::Kind::Theorem2;
  bp.predicted_upper = kTwoPi * delta0 * delta0;

  const double t_budget = 100.0 * bp.predicted_upper + 1.0;
  Trajectory traj = integrate(kernels, initial, t_budget, options);
  if (!traj.terminated_by_event())
    throw Error(ErrorCode::StiffnessBudgetExceeded, "no event before the time budget");
  const Event& ev = traj.events.back();
  bp.measured = ev.time;
  bp.measured_uncertainty = ev.time_uncertainty;
  bp.event_kind_matches =
      std::holds_alternative<BoundaryHit>(ev.kind) && std::get<BoundaryHit>(ev.kind).index == 0;

  // sweep: rescale the first dislocation's boundary distance and fit the
  // next-order coefficient of T(delta) = 2 pi delta^2 + C delta^3
  const ClosestPoint cp0 = dom.closest_boundary_point(initial.z[0]);
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double dk = delta0 * 0.9 / std::pow(2.0, k);
    DislocationSystem s = initial;
    s.z[0] = cp0.bp.s - dk * cp0.bp.nu;
    Trajectory tk = integrate(kernels, s, t_budget, options);
    if (!tk.terminated_by_event()) continue;
    const double resid = tk.events.back().time - kTwoPi * dk * dk;
    num += resid * dk * dk * dk;
    den += dk * dk * dk * dk * dk * dk;
  }
  bp.cubic_fit = den > 0.0 ? num / den : 0.0;
  bp.satisfied_leading_order =
      bp.measured <= bp.predicted_upper + std::max(bp.cubic_fit, 0.0) * delta0 * delta0 * delta0 +
                         1e-6 + bp.measured_uncertainty;
  return bp;
}

BoundPrediction predict_theorem3(const GreensEvaluator& kernels, const DislocationSystem& initial,
                                 double zeta0, double eta0, double delta0,
                                 const IntegrateOptions& options) {
  const Domain& dom = kernels.domain();
  const int n = initial.size();
  if (n < 2) throw Error(ErrorCode::EmptyConfiguration, "theorem 3 needs n >= 2");
  if (initial.b[0] * initial.b[1] >= 0)
    throw Error(ErrorCode::InvalidInitial, "leading pair must have opposite Burgers moduli");
  const RegionCheck rc = in_region_C(dom, initial.z, zeta0, eta0);
  if (!rc.member)
    throw Error(ErrorCode::NotInRegime, "initial configuration is not in C_{n,zeta0,eta0}");

  BoundPrediction bp;
  bp.kind = BoundPrediction::Kind::Theorem3;
  if (std::isinf(eta0)) {
    bp.predicted_upper = 0.5 * kPi * zeta0 * zeta0;
  } else {
    const double denom =
        eta0 * eta0 - zeta0 * zeta0 - 2.0 * (n - 2) * zeta0 * delta0;
    if (denom <= 0.0)
      throw Error(ErrorCode::NonpositiveDenominator,
                  "theorem 3 bound undefined for these parameters");
    bp.predicted_upper = 0.5 * kPi * zeta0 * zeta0 * eta0 * eta0 / denom;
  }

  const double t_budget = 100.0 * bp.predicted_upper + 1.0;
  Trajectory traj = integrate(kernels, initial, t_budget, options);
  if (!traj.terminated_by_event())
    throw Error(ErrorCode::StiffnessBudgetExceeded, "no event before the time budget");
  const Event& ev = traj.events.back();
  bp.measured = ev.time;
  bp.measured_uncertainty = ev.time_uncertainty;
  bp.event_kind_matches = std::holds_alternative<DipoleCollision>(ev.kind);
  bp.satisfied_leading_order = bp.measured <= bp.predicted_upper + 1e-9 + bp.measured_uncertainty;
  return bp;
}

double incidence_angle_deg(const Domain& domain, const Trajectory& traj, std::size_t event_index) {
  if (event_index >= traj.events.size())
    throw Error(ErrorCode::InsufficientSamples, "no such event");
  const Event& ev = traj.events[event_index];
  if (!std::holds_alternative<BoundaryHit>(ev.kind))
    throw Error(ErrorCode::InsufficientSamples, "incidence angle needs a boundary hit");
  const BoundaryHit& hit = std::get<BoundaryHit>(ev.kind);
  const double window = std::isfinite(domain.rho_bar()) ? domain.rho_bar() / 4.0 : kInf;

  std::vector<Vec2> pts;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] > ev.time) break;
    const Vec2 p = traj.positions[k][hit.index];
    if (!std::isfinite(p.x)) continue;
    if (domain.boundary_distance(p) < window) pts.push_back(p);
  }
  if (pts.size() < 5)
    throw Error(ErrorCode::InsufficientSamples,
                "need at least 5 samples inside the terminal window");
  if (pts.size() > 32) pts.erase(pts.begin(), pts.end() - 32);

  // principal direction of the terminal segment
  Vec2 mean{0.0, 0.0};
  for (const Vec2& p : pts) mean += p;
  mean = mean / static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const Vec2& p : pts) {
    const Vec2 q = p - mean;
    sxx += q.x * q.x;
    sxy += q.x * q.y;
    syy += q.y * q.y;
  }
  const double tr = sxx + syy, det = sxx * syy - sxy * sxy;
  const double lam = 0.5 * tr + std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
  Vec2 dir = std::abs(sxy) > 1e-300 ? Vec2{lam - syy, sxy}.normalized()
                                    : (sxx >= syy ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0});
  // orient along the motion
  if ((pts.back() - pts.front()).dot(dir) < 0.0) dir = -dir;
  const double cosang = std::clamp(dir.dot(hit.where.nu), -1.0, 1.0);
  return std::acos(cosang) * 180.0 / kPi;
}

}  // namespace disloc
