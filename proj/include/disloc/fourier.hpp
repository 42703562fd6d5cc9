#pragma once

#include <complex>
#include <vector>

#include "disloc/vec.hpp"

namespace disloc {

// In-place radix-2 FFT; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

std::vector<std::complex<double>> fft_real(const std::vector<double>& samples);

// Harmonic extension of periodic boundary samples into the unit disk:
// u(z) = Re sum_k c_k z^k, built from the DFT of equispaced samples.
// Coefficients beyond the requested tolerance are dropped.
class DiskHarmonicSeries {
 public:
  DiskHarmonicSeries() = default;
  // samples: values at theta_j = 2 pi j / M, M a power of two
  explicit DiskHarmonicSeries(const std::vector<double>& samples, double drop_tol = 1e-15);

  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
  // bound on the truncated tail at radius r (monotone in r)
  double tail_bound(double r) const;
  int modes() const { return static_cast<int>(coeff_.size()); }

 private:
  std::vector<std::complex<double>> coeff_;  // c_0 .. c_K
};

// Periodic antiderivative with linear ramp: given samples of m(t) on
// [0, 2pi), represents g(t) = mean(m) * t + periodic part, g(0) = 0.
class PeriodicAntiderivative {
 public:
  PeriodicAntiderivative() = default;
  explicit PeriodicAntiderivative(const std::vector<double>& samples, double drop_tol = 1e-15);

  double operator()(double t) const;
  double mean() const { return mean_; }

 private:
  double mean_ = 0.0;
  std::vector<std::complex<double>> coeff_;  // k = 1..K of m
};

}  // namespace disloc
