#include "disloc/confinement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "disloc/parallel.hpp"

namespace disloc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kDatumSamples = 4096;

void require_compatible(const BoundaryDatum& datum) {
  if (std::abs(datum.total_circulation() - kTwoPi) > 1e-8)
    throw Error(ErrorCode::IncompatibleDatum, "total circulation of f must be 2 pi");
}

// continuous angle of p(t) - a along the boundary, unwrapped from t = 0;
// increases by exactly 2 pi per loop for interior a
class UnwrappedAngle {
 public:
  UnwrappedAngle(const Domain& domain, Vec2 a) : curve_(domain.curve()), a_(a) {
    samples_.resize(kDatumSamples + 1);
    double prev = std::atan2(curve_.point(0.0).y - a.y, curve_.point(0.0).x - a.x);
    samples_[0] = prev;
    for (int i = 1; i <= kDatumSamples; ++i) {
      const Vec2 p = curve_.point(kTwoPi * i / kDatumSamples);
      double ang = std::atan2(p.y - a.y, p.x - a.x);
      while (ang < prev - kPi) ang += kTwoPi;
      while (ang > prev + kPi) ang -= kTwoPi;
      samples_[i] = ang;
      prev = ang;
    }
    if (std::abs(samples_[kDatumSamples] - samples_[0] - kTwoPi) > 1e-9)
      throw Error(ErrorCode::OutsideDomain, "winding of the boundary about a is not one");
  }

  double operator()(double t) const {
    double tt = std::fmod(t, kTwoPi);
    if (tt < 0) tt += kTwoPi;
    const double u = tt / kTwoPi * kDatumSamples;
    const int i0 = std::min(static_cast<int>(u), kDatumSamples - 1);
    // seed from the table, then polish with atan2 re-centering
    const double approx = samples_[i0] + (u - i0) * (samples_[i0 + 1] - samples_[i0]);
    const Vec2 p = curve_.point(tt);
    double ang = std::atan2(p.y - a_.y, p.x - a_.x);
    while (ang < approx - kPi) ang += kTwoPi;
    while (ang > approx + kPi) ang -= kTwoPi;
    return ang + (t - tt);  // extend across full turns, winding one per loop
  }

 private:
  std::vector<double> samples_;
  FourierCurve curve_;
  Vec2 a_;
};

}  // namespace

BoundaryDatum::BoundaryDatum(const Domain& domain, std::function<double(double)> f)
    : domain_(domain), f_(std::move(f)) {
  if (!domain.bounded())
    throw Error(ErrorCode::UnboundedDomain, "boundary datum needs a bounded domain");
  const auto& curve = domain.curve();
  std::vector<double> m(kDatumSamples);
  for (int i = 0; i < kDatumSamples; ++i) {
    const double t = kTwoPi * i / kDatumSamples;
    m[i] = f_(t) * curve.deriv(t).norm();
  }
  g_ = PeriodicAntiderivative(m);
  circulation_ = g_.mean() * kTwoPi;
}

double BoundaryDatum::g(double t) const { return g_(t); }

BoundaryDatum BoundaryDatum::uniform(const Domain& domain) {
  const double c = kTwoPi / domain.boundary_length();
  return BoundaryDatum(domain, [c](double) { return c; });
}

BoundaryDatum BoundaryDatum::fourier(const Domain& domain, std::vector<double> cos_coeff,
                                     std::vector<double> sin_coeff) {
  const std::size_t n = std::max(cos_coeff.size(), sin_coeff.size());
  cos_coeff.resize(n, 0.0);
  sin_coeff.resize(n, 0.0);
  auto f = [cos_coeff, sin_coeff](double t) {
    double v = 0.0;
    for (std::size_t k = 0; k < cos_coeff.size(); ++k)
      v += cos_coeff[k] * std::cos(k * t) + sin_coeff[k] * std::sin(k * t);
    return v;
  };
  return BoundaryDatum(domain, f);
}

BoundaryDatum BoundaryDatum::shifted_vortex(const Domain& domain, Vec2 a_star) {
  if (!domain.contains(a_star))
    throw Error(ErrorCode::OutsideDomain, "vortex center must be interior");
  const FourierCurve curve = domain.curve();
  auto f = [curve, a_star](double t) {
    const Vec2 d1 = curve.deriv(t);
    return vortex_field(a_star, curve.point(t)).dot(d1 / d1.norm());
  };
  return BoundaryDatum(domain, f);
}

Vec2 vortex_field(Vec2 a, Vec2 x) {
  const Vec2 r = x - a;
  return r.perp() / r.norm2();
}

namespace {

struct SolvedPotential {
  HarmonicFunction w;
  double residual = 0.0;
};

// Dirichlet data g - theta_a, continuous by the circulation compatibility
std::function<double(double)> combined_datum(const BoundaryDatum& datum, const Domain& domain,
                                             Vec2 a) {
  auto angle = std::make_shared<UnwrappedAngle>(domain, a);
  const BoundaryDatum* d = &datum;
  // capture datum by value through a shared copy to keep lifetimes simple
  auto datum_copy = std::make_shared<BoundaryDatum>(datum);
  (void)d;
  auto fn = [angle, datum_copy](double t) { return datum_copy->g(t) - (*angle)(t); };
  // closure check: compatibility must make the combined datum periodic
  const double jump = std::abs(fn(kTwoPi - 1e-12) - fn(0.0) -
                               (datum_copy->total_circulation() - kTwoPi));
  if (jump > 1e-5)
    throw Error(ErrorCode::IncompatibleDatum, "combined datum g - theta_a is discontinuous");
  return fn;
}

SolvedPotential solve_limit_potential(const Domain& domain, const BoundaryDatum& datum, Vec2 a,
                                      const ConfinementOptions& opts) {
  DirichletProblem p;
  p.domain = domain;
  p.boundary_data = combined_datum(datum, domain, a);
  p.requested_tolerance = opts.solver_tol;
  const DirichletBackend backend = domain.kind() == DomainKind::UnitDisk
                                       ? DirichletBackend::DiskFourier
                                       : DirichletBackend::Mfs;
  HarmonicFunction v = solve_dirichlet(p, backend);
  return {v, v.boundary_residual()};
}

}  // namespace

ConfinementResult gamma_limit_F(const Domain& domain, const BoundaryDatum& datum, Vec2 a,
                                const ConfinementOptions& options) {
  require_compatible(datum);
  if (!domain.bounded())
    throw Error(ErrorCode::UnboundedDomain, "limit functional needs a bounded domain");
  ConfinementResult res;
  res.a = a;
  const double d1 = domain.boundary_distance(a);
  if (!domain.contains(a)) {
    if (d1 < 1e-12) {  // boundary point: +inf by convention
      res.F_limit = kInf;
      return res;
    }
    throw Error(ErrorCode::OutsideDomain, "probe point outside the closure");
  }

  const SolvedPotential sol = solve_limit_potential(domain, datum, a, options);
  auto R = ray_radius(domain, a);

  double err = 0.0;
  // (1/2) int_{Omega_d} |K_a|^2 in closed polar form
  const QuadratureResult logpart = log_radius_integral(R, d1, options.quad_tol);
  err += logpart.error_estimate;

  // cross and gradient terms over the annular region
  PolarRegion outer_region{a, d1, R};
  auto cross_fn = [&](Vec2 x) { return vortex_field(a, x).dot(sol.w.gradient(x)); };
  const QuadratureResult cross = polar_quadrature(cross_fn, outer_region, options.quad_tol,
                                                  options.quad_levels);
  err += cross.error_estimate;
  auto grad2 = [&](Vec2 x) { return sol.w.gradient(x); };
  const QuadratureResult outer_grad = energy_quadrature(grad2, outer_region, options.quad_tol,
                                                        options.quad_levels);
  err += outer_grad.error_estimate;

  // (1/2) int_{B_d(a)} |grad v|^2
  PolarRegion ball{a, 0.0, [d1](double) { return d1; }};
  const QuadratureResult inner_grad = energy_quadrature(grad2, ball, options.quad_tol,
                                                        options.quad_levels);
  err += inner_grad.error_estimate;

  res.F_limit = kPi * std::log(d1) + logpart.value + cross.value + outer_grad.value +
                inner_grad.value;
  res.error_estimate = err + sol.residual;
  res.solver_residual = sol.residual;
  return res;
}

ConfinementResult regularized_E_eps(const Domain& domain, const BoundaryDatum& datum, Vec2 a,
                                    double epsilon, const ConfinementOptions& options) {
  require_compatible(datum);
  ConfinementResult res;
  res.a = a;
  res.epsilon = epsilon;
  if (!domain.contains(a)) throw Error(ErrorCode::OutsideDomain, "core center must be interior");
  const double d1 = domain.boundary_distance(a);
  if (!(epsilon > 0.0) || epsilon >= d1)
    throw Error(ErrorCode::CoreTouchesBoundary, "need 0 < eps < d_1(a)");

  PuncturedMixedProblem p;
  p.domain = domain;
  p.core_center = a;
  p.core_radius = epsilon;
  p.outer_dirichlet_data = combined_datum(datum, domain, a);
  p.requested_tolerance = options.solver_tol;
  HarmonicFunction w = solve_punctured_mixed(p);

  auto R = ray_radius(domain, a);
  double err = 0.0;
  const QuadratureResult logpart = log_radius_integral(R, epsilon, options.quad_tol);
  err += logpart.error_estimate;
  PolarRegion region{a, epsilon, R};
  auto cross_fn = [&](Vec2 x) { return vortex_field(a, x).dot(w.gradient(x)); };
  const QuadratureResult cross = polar_quadrature(cross_fn, region, options.quad_tol,
                                                  options.quad_levels);
  err += cross.error_estimate;
  auto grad = [&](Vec2 x) { return w.gradient(x); };
  const QuadratureResult grad2 = energy_quadrature(grad, region, options.quad_tol,
                                                   options.quad_levels);
  err += grad2.error_estimate;

  const double E = logpart.value + cross.value + grad2.value;
  res.E_eps = E;
  res.F_eps = E - kPi * std::abs(std::log(epsilon));
  res.error_estimate = err + w.boundary_residual();
  res.solver_residual = w.boundary_residual();
  return res;
}

MinimizeResult minimize_F(const Domain& domain, const BoundaryDatum& datum,
                          const MinimizeOptions& options) {
  require_compatible(datum);
  MinimizeResult out;
  ConfinementOptions coarse = options.fine;
  coarse.quad_tol = options.coarse_quad_tol;

  const Vec2 lo = domain.bbox_lo(), hi = domain.bbox_hi();
  int evals = 0;
  auto F_at = [&](Vec2 p, const ConfinementOptions& o) {
    if (++evals > options.eval_budget)
      throw Error(ErrorCode::SearchBudgetExceeded, "minimizer evaluation budget exhausted");
    return *gamma_limit_F(domain, datum, p, o).F_limit;
  };

  double best = kInf;
  Vec2 best_p{};
  for (int i = 0; i < options.grid; ++i) {
    for (int j = 0; j < options.grid; ++j) {
      const Vec2 p{lo.x + (hi.x - lo.x) * (i + 0.5) / options.grid,
                   lo.y + (hi.y - lo.y) * (j + 0.5) / options.grid};
      if (!domain.contains(p)) continue;
      if (domain.boundary_distance(p) < options.boundary_floor) continue;
      const double v = F_at(p, coarse);
      out.grid_points.push_back(p);
      out.grid_values.push_back(v);
      if (v < best) {
        best = v;
        best_p = p;
      }
    }
  }
  if (out.grid_points.empty())
    throw Error(ErrorCode::SearchBudgetExceeded, "no admissible grid points");

  // coordinate descent with shrinking steps
  double step = (hi.x - lo.x) / options.grid;
  double cur = F_at(best_p, options.fine);
  while (step > options.descent_tol) {
    bool improved = false;
    for (const Vec2 dir : {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, -1}}) {
      const Vec2 q = best_p + step * dir;
      if (!domain.contains(q) || domain.boundary_distance(q) < 1e-4) continue;
      const double v = F_at(q, options.fine);
      if (v < cur - 1e-14) {
        cur = v;
        best_p = q;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }

  out.a_min = best_p;
  out.F_min = cur;
  out.interior_distance = domain.boundary_distance(best_p);
  out.grid_evaluations = evals;

  // certified margin: smallest boundary distance among grid points whose value
  // comes within the tolerance gap of the minimum
  const double gap = std::max(1e-3, 10.0 * options.coarse_quad_tol);
  double margin = kInf;
  for (std::size_t i = 0; i < out.grid_points.size(); ++i)
    if (out.grid_values[i] <= cur + gap)
      margin = std::min(margin, domain.boundary_distance(out.grid_points[i]));
  out.certified_margin = margin;
  return out;
}

std::vector<ConvergenceRow> epsilon_convergence_study(const Domain& domain,
                                                      const BoundaryDatum& datum,
                                                      std::span<const Vec2> probes,
                                                      std::span<const double> eps_seq,
                                                      const ConfinementOptions& options,
                                                      ExecutionPolicy policy) {
  require_compatible(datum);
  for (const Vec2& p : probes)
    if (!domain.contains(p)) throw Error(ErrorCode::OutsideDomain, "probe outside the domain");
  for (std::size_t k = 1; k < eps_seq.size(); ++k)
    if (!(eps_seq[k] < eps_seq[k - 1]))
      throw Error(ErrorCode::InvalidConfig, "epsilon sequence must decrease");

  std::vector<ConvergenceRow> rows(probes.size() * eps_seq.size());
  std::vector<double> limits(probes.size());
  parallel_for(static_cast<std::int64_t>(probes.size()), policy, [&](std::int64_t i) {
    limits[i] = *gamma_limit_F(domain, datum, probes[i], options).F_limit;
  });
  parallel_for(static_cast<std::int64_t>(rows.size()), policy, [&](std::int64_t idx) {
    const std::size_t i = idx / eps_seq.size();
    const std::size_t k = idx % eps_seq.size();
    const ConfinementResult r = regularized_E_eps(domain, datum, probes[i], eps_seq[k], options);
    ConvergenceRow row;
    row.a = probes[i];
    row.eps = eps_seq[k];
    row.F_eps = *r.F_eps;
    row.F_limit = limits[i];
    row.gap = std::abs(row.F_eps - row.F_limit);
    rows[idx] = row;
  });
  return rows;
}

}  // namespace disloc
