#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "disloc/fourier.hpp"
#include "disloc/harmonic.hpp"

namespace disloc {

// Prescribed tangential strain f on the boundary with primitive g accumulated
// from the parameter anchor t = 0 (g(0) = 0; the additive constant is
// immaterial since only gradients of the solved potentials enter energies).
class BoundaryDatum {
 public:
  static BoundaryDatum uniform(const Domain& domain);
  static BoundaryDatum fourier(const Domain& domain, std::vector<double> cos_coeff,
                               std::vector<double> sin_coeff);
  // manufactured datum f = K_{a*} . tau with a known vortex center
  static BoundaryDatum shifted_vortex(const Domain& domain, Vec2 a_star);

  double f(double t) const { return f_(t); }
  double g(double t) const;
  double total_circulation() const { return circulation_; }
  const Domain& domain() const { return domain_; }

 private:
  BoundaryDatum(const Domain& domain, std::function<double(double)> f);
  Domain domain_;
  std::function<double(double)> f_;
  PeriodicAntiderivative g_;
  double circulation_ = 0.0;
};

// unit-circulation vortex field K_a(x) about a
Vec2 vortex_field(Vec2 a, Vec2 x);

struct ConfinementResult {
  Vec2 a;
  std::optional<double> epsilon;
  std::optional<double> E_eps;
  std::optional<double> F_eps;   // E_eps - pi |log eps|
  std::optional<double> F_limit; // the limit functional
  double error_estimate = 0.0;
  double solver_residual = 0.0;
};

struct ConfinementOptions {
  double quad_tol = 1e-8;
  double solver_tol = 1e-8;
  int quad_levels = 6;
};

// limit functional F(a) = pi log d_1(a)
//   + (1/2) int_{Omega_d(a)} |K_a + grad v_a|^2 + (1/2) int_{B_d(a)} |grad v_a|^2,
// with v_a the harmonic extension of g - theta_a; +inf on the boundary
ConfinementResult gamma_limit_F(const Domain& domain, const BoundaryDatum& datum, Vec2 a,
                                const ConfinementOptions& options = {});

// core-regularized minimal energy on the punctured domain and its shift
ConfinementResult regularized_E_eps(const Domain& domain, const BoundaryDatum& datum, Vec2 a,
                                    double epsilon, const ConfinementOptions& options = {});

struct MinimizeOptions {
  int grid = 64;
  double boundary_floor = 0.02;      // skip grid points with d_1 below this
  double descent_tol = 1e-6;         // step size at which the descent stops
  int eval_budget = 20000;
  double coarse_quad_tol = 1e-6;
  ConfinementOptions fine;
};

struct MinimizeResult {
  Vec2 a_min;
  double F_min = 0.0;
  double interior_distance = 0.0;   // d_1(a_min)
  double certified_margin = 0.0;    // grid points closer to the boundary than
                                    // this all exceed the found minimum
  int grid_evaluations = 0;
  std::vector<Vec2> grid_points;
  std::vector<double> grid_values;
};

MinimizeResult minimize_F(const Domain& domain, const BoundaryDatum& datum,
                          const MinimizeOptions& options = {});

struct ConvergenceRow {
  Vec2 a;
  double eps = 0.0;
  double F_eps = 0.0;
  double F_limit = 0.0;
  double gap = 0.0;  // |F_eps - F_limit|
};

std::vector<ConvergenceRow> epsilon_convergence_study(const Domain& domain,
                                                      const BoundaryDatum& datum,
                                                      std::span<const Vec2> probes,
                                                      std::span<const double> eps_seq,
                                                      const ConfinementOptions& options = {},
                                                      ExecutionPolicy policy = ExecutionPolicy::Parallel);

}  // namespace disloc
