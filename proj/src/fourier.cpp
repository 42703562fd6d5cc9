#include "disloc/fourier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace disloc {

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

std::vector<std::complex<double>> fft_real(const std::vector<double>& samples) {
  std::vector<std::complex<double>> a(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) a[i] = samples[i];
  fft_inplace(a, false);
  return a;
}

DiskHarmonicSeries::DiskHarmonicSeries(const std::vector<double>& samples, double drop_tol) {
  auto F = fft_real(samples);
  const std::size_t m = samples.size();
  // u(e^{i t}) = (1/M)(F_0 + 2 Re sum_{k=1}^{M/2-1} F_k e^{ikt} + Re F_{M/2} e^{i M t / 2})
  std::vector<std::complex<double>> c(m / 2 + 1);
  c[0] = F[0].real() / static_cast<double>(m);
  for (std::size_t k = 1; k < m / 2; ++k) c[k] = 2.0 * F[k] / static_cast<double>(m);
  c[m / 2] = F[m / 2] / static_cast<double>(m);
  double cmax = 0.0;
  for (auto& v : c) cmax = std::max(cmax, std::abs(v));
  std::size_t keep = c.size();
  const double cut = drop_tol * std::max(cmax, 1e-300);
  while (keep > 1 && std::abs(c[keep - 1]) < cut) --keep;
  c.resize(keep);
  coeff_ = std::move(c);
}

double DiskHarmonicSeries::value(Vec2 x) const {
  // Horner in z for sum c_k z^k
  const std::complex<double> z(x.x, x.y);
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t k = coeff_.size(); k-- > 0;) acc = acc * z + coeff_[k];
  return acc.real();
}

Vec2 DiskHarmonicSeries::gradient(Vec2 x) const {
  // u = Re Phi, Phi' = sum k c_k z^{k-1}; grad u = (Re Phi', -Im Phi')
  const std::complex<double> z(x.x, x.y);
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t k = coeff_.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * coeff_[k];
  return {acc.real(), -acc.imag()};
}

double DiskHarmonicSeries::tail_bound(double r) const {
  if (coeff_.empty()) return 0.0;
  const double cK = std::abs(coeff_.back());
  if (r >= 1.0) return cK * static_cast<double>(coeff_.size());
  // geometric bound assuming the tail keeps decaying at least like the kept part
  return cK * std::pow(r, static_cast<double>(coeff_.size() - 1)) / (1.0 - r);
}

PeriodicAntiderivative::PeriodicAntiderivative(const std::vector<double>& samples, double drop_tol) {
  auto F = fft_real(samples);
  const std::size_t m = samples.size();
  mean_ = F[0].real() / static_cast<double>(m);
  std::vector<std::complex<double>> c(m / 2);
  for (std::size_t k = 1; k < m / 2; ++k) c[k] = 2.0 * F[k] / static_cast<double>(m);
  double cmax = 0.0;
  for (auto& v : c) cmax = std::max(cmax, std::abs(v));
  std::size_t keep = c.size();
  const double cut = drop_tol * std::max(cmax, 1e-300);
  while (keep > 1 && std::abs(c[keep - 1]) < cut) --keep;
  c.resize(keep);
  coeff_ = std::move(c);
}

double PeriodicAntiderivative::operator()(double t) const {
  // g(t) = mean t + sum_{k>=1} Re[ c_k (e^{ikt} - 1) / (ik) ]
  double g = mean_ * t;
  const std::complex<double> eit(std::cos(t), std::sin(t));
  std::complex<double> eikt = eit;
  for (std::size_t k = 1; k < coeff_.size(); ++k) {
    const std::complex<double> ik(0.0, static_cast<double>(k));
    g += ((eikt - 1.0) / ik * coeff_[k]).real();
    eikt *= eit;
  }
  return g;
}

}  // namespace disloc
