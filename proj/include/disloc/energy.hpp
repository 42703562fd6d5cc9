#pragma once

#include <optional>
#include <vector>

#include "disloc/greens.hpp"

namespace disloc {

struct DislocationSystem {
  std::vector<Vec2> z;  // positions
  std::vector<int> b;   // Burgers moduli, +1 / -1 in every paper scenario

  int size() const { return static_cast<int>(z.size()); }
};

// throws on empty/coincident/exterior configurations
void validate_system(const Domain& domain, const DislocationSystem& sys);

struct ForceReport {
  std::vector<Vec2> f;
  // populated when a near-boundary index is supplied:
  std::optional<Vec2> leading_term;  // nu(s) / (4 pi d_1)
  std::optional<Vec2> residual;      // f_near - leading_term
  double error_estimate = 0.0;
};

// E_n = sum_{i<j} b_i b_j (k(z_i,z_j) - log|z_i - z_j| / 2pi) + (1/2) sum_i h(z_i)
double renormalized_energy(const GreensEvaluator& kernels, const DislocationSystem& sys);
double renormalized_energy(const Domain& domain, const DislocationSystem& sys);

// f_i = -grad_{z_i} E_n
ForceReport peach_koehler(const GreensEvaluator& kernels, const DislocationSystem& sys,
                          std::optional<int> near_boundary_index = std::nullopt);
ForceReport peach_koehler(const Domain& domain, const DislocationSystem& sys,
                          std::optional<int> near_boundary_index = std::nullopt);

// central differences of -E_n; the independent check of peach_koehler
std::vector<Vec2> finite_difference_gradient(const GreensEvaluator& kernels,
                                             const DislocationSystem& sys, double step);
std::vector<Vec2> finite_difference_gradient(const Domain& domain, const DislocationSystem& sys,
                                             double step);

}  // namespace disloc
