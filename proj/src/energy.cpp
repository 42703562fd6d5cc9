#include "disloc/energy.hpp"

#include <cmath>
#include <numbers>

namespace disloc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;
}  // namespace

void validate_system(const Domain& domain, const DislocationSystem& sys) {
  if (sys.z.empty()) throw Error(ErrorCode::EmptyConfiguration, "no dislocations");
  if (sys.b.size() != sys.z.size())
    throw Error(ErrorCode::InvalidInitial, "positions and Burgers moduli sizes differ");
  for (const Vec2& p : sys.z)
    if (!domain.contains(p)) throw Error(ErrorCode::OutsideDomain, "dislocation outside the domain");
  for (std::size_t i = 0; i < sys.z.size(); ++i)
    for (std::size_t j = i + 1; j < sys.z.size(); ++j)
      if (dist(sys.z[i], sys.z[j]) < 1e-12)
        throw Error(ErrorCode::CoincidentDislocations, "dislocation positions coincide");
  for (int bi : sys.b)
    if (bi == 0) throw Error(ErrorCode::InvalidInitial, "Burgers modulus must be nonzero");
}

double renormalized_energy(const GreensEvaluator& kernels, const DislocationSystem& sys) {
  validate_system(kernels.domain(), sys);
  const int n = sys.size();
  double e = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double kij = kernels.k(sys.z[i], sys.z[j]).value;
      const double lg = std::log(dist(sys.z[i], sys.z[j])) / kTwoPi;
      e += sys.b[i] * sys.b[j] * (kij - lg);
    }
    e += 0.5 * kernels.h(sys.z[i]).value;
  }
  return e;
}

double renormalized_energy(const Domain& domain, const DislocationSystem& sys) {
  GreensEvaluator kernels(domain);
  return renormalized_energy(kernels, sys);
}

ForceReport peach_koehler(const GreensEvaluator& kernels, const DislocationSystem& sys,
                          std::optional<int> near_boundary_index) {
  validate_system(kernels.domain(), sys);
  const int n = sys.size();
  ForceReport rep;
  rep.f.assign(n, Vec2{});
  for (int i = 0; i < n; ++i) {
    Vec2 grad{0.0, 0.0};
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const KernelEvaluation kij = kernels.k(sys.z[i], sys.z[j]);
      const Vec2 r = sys.z[i] - sys.z[j];
      grad += static_cast<double>(sys.b[i] * sys.b[j]) *
              (kij.gradient_x - r / (kTwoPi * r.norm2()));
      err += kij.error_estimate;
    }
    const KernelEvaluation hi = kernels.h(sys.z[i]);
    grad += 0.5 * hi.gradient_x;
    err += 0.5 * hi.error_estimate;
    rep.f[i] = -grad;
    rep.error_estimate = std::max(rep.error_estimate, err);
  }
  if (near_boundary_index && kernels.domain().has_boundary()) {
    const int i = *near_boundary_index;
    if (i < 0 || i >= n) throw Error(ErrorCode::InvalidInitial, "near-boundary index out of range");
    const ClosestPoint cp = kernels.domain().closest_boundary_point(sys.z[i]);
    rep.leading_term = cp.bp.nu / (kFourPi * cp.dist);
    rep.residual = rep.f[i] - *rep.leading_term;
  }
  return rep;
}

ForceReport peach_koehler(const Domain& domain, const DislocationSystem& sys,
                          std::optional<int> near_boundary_index) {
  GreensEvaluator kernels(domain);
  return peach_koehler(kernels, sys, near_boundary_index);
}

std::vector<Vec2> finite_difference_gradient(const GreensEvaluator& kernels,
                                             const DislocationSystem& sys, double step) {
  validate_system(kernels.domain(), sys);
  if (!(step > 0.0)) throw Error(ErrorCode::StepTooLarge, "step must be positive");
  // the step must stay well below every configuration scale
  const double scale = d_n(kernels.domain(), sys.z);
  if (std::isfinite(scale) && step >= 0.5 * scale)
    throw Error(ErrorCode::StepTooLarge, "step comparable to the configuration scale");
  const int n = sys.size();
  std::vector<Vec2> out(n);
  DislocationSystem pert = sys;
  auto energy_at = [&](int i, Vec2 p) {
    pert.z[i] = p;
    for (const Vec2& q : pert.z)
      if (!kernels.domain().contains(q))
        throw Error(ErrorCode::StepTooLarge, "perturbed configuration leaves the domain");
    for (int a = 0; a < n; ++a)
      for (int b2 = a + 1; b2 < n; ++b2)
        if (dist(pert.z[a], pert.z[b2]) < 1e-12)
          throw Error(ErrorCode::StepTooLarge, "perturbed configuration collides");
    const double e = renormalized_energy(kernels, pert);
    pert.z[i] = sys.z[i];
    return e;
  };
  for (int i = 0; i < n; ++i) {
    const Vec2 zi = sys.z[i];
    const double ex = energy_at(i, zi + Vec2{step, 0.0}) - energy_at(i, zi - Vec2{step, 0.0});
    const double ey = energy_at(i, zi + Vec2{0.0, step}) - energy_at(i, zi - Vec2{0.0, step});
    out[i] = {-ex / (2.0 * step), -ey / (2.0 * step)};
  }
  return out;
}

std::vector<Vec2> finite_difference_gradient(const Domain& domain, const DislocationSystem& sys,
                                             double step) {
  GreensEvaluator kernels(domain);
  return finite_difference_gradient(kernels, sys, step);
}

}  // namespace disloc
