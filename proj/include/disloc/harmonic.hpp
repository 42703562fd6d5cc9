#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "disloc/geometry.hpp"
#include "disloc/parallel.hpp"
#include "disloc/vec.hpp"

namespace disloc {

struct DirichletProblem {
  Domain domain;
  std::function<double(double)> boundary_data;  // by curve parameter t in [0, 2pi)
  double requested_tolerance = 0.0;             // 0: per-domain default (1e-8 disk, 1e-6 parametric)
};

struct PuncturedMixedProblem {
  Domain domain;
  Vec2 core_center;
  double core_radius = 0.0;
  std::function<double(double)> outer_dirichlet_data;  // on the domain boundary
  // inner Neumann datum is identically zero
  double requested_tolerance = 0.0;
};

// Immutable evaluator for a solved harmonic function; safe for concurrent use.
class HarmonicFunction {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual double value(Vec2 x) const = 0;
    virtual Vec2 gradient(Vec2 x) const = 0;
    virtual double error_estimate(Vec2 x) const = 0;
    virtual double boundary_residual() const = 0;
    virtual const char* backend() const = 0;
  };

  HarmonicFunction() = default;
  explicit HarmonicFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  double value(Vec2 x) const { return impl_->value(x); }
  Vec2 gradient(Vec2 x) const { return impl_->gradient(x); }
  double error_estimate(Vec2 x) const { return impl_->error_estimate(x); }
  double boundary_residual() const { return impl_->boundary_residual(); }
  const char* backend() const { return impl_->backend(); }
  bool valid() const { return impl_ != nullptr; }

 private:
  std::shared_ptr<const Impl> impl_;
};

enum class DirichletBackend { Auto, DiskFourier, Nystrom, Mfs };

HarmonicFunction solve_dirichlet(const DirichletProblem& problem,
                                 DirichletBackend backend = DirichletBackend::Auto);

HarmonicFunction solve_punctured_mixed(const PuncturedMixedProblem& problem);

// Second-kind boundary-integral solver (double-layer potential, trapezoid
// Nystrom on the periodic parametrization). Shared by greens and harmonic.
class NystromDirichlet {
 public:
  NystromDirichlet(const Domain& domain, int points,
                   ExecutionPolicy assembly = ExecutionPolicy::Parallel);
  ~NystromDirichlet();
  NystromDirichlet(const NystromDirichlet&) = delete;
  NystromDirichlet& operator=(const NystromDirichlet&) = delete;

  int points() const;
  const Domain& domain() const;
  double node_param(int j) const;
  Vec2 node(int j) const;
  // density solving (-I/2 + D) phi = data
  std::vector<double> solve(const std::vector<double>& data_at_nodes) const;
  double eval(const std::vector<double>& density, Vec2 x) const;
  Vec2 eval_gradient(const std::vector<double>& density, Vec2 x) const;
  // distance below which plain trapezoid evaluation degrades (~4 L / N)
  double resolve_distance() const;
  // exponential accuracy envelope at boundary distance d
  double eval_error_envelope(double d) const;
  const std::vector<double>& assembled_matrix() const;  // row-major, for tests/bench

  struct ImplData;

 private:
  std::unique_ptr<ImplData> data_;
};

// radius of the domain seen from an interior center along direction theta;
// requires the domain to be star-shaped with respect to the center
std::function<double(double)> ray_radius(const Domain& domain, Vec2 center);

struct PolarRegion {
  Vec2 center;
  double inner = 0.0;                   // inner radius (0: full disk sector)
  std::function<double(double)> outer;  // outer radius by angle
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int levels = 0;
};

// integral of a scalar integrand over a polar region, adaptive in resolution
QuadratureResult polar_quadrature(const std::function<double(Vec2)>& integrand,
                                  const PolarRegion& region, double abs_tol,
                                  int max_levels = 6);

// (1/2) * integral of |field|^2 over the region
QuadratureResult energy_quadrature(const std::function<Vec2(Vec2)>& field,
                                   const PolarRegion& region, double abs_tol,
                                   int max_levels = 6);

// (1/2) * integral over {inner < |x-center| < R(theta)} of 1/rho^2
// = (1/2) * integral_0^{2pi} log(R(theta)/inner) dtheta, computed adaptively
QuadratureResult log_radius_integral(const std::function<double(double)>& outer, double inner,
                                     double abs_tol);

}  // namespace disloc
