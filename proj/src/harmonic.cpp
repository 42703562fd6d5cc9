#include "disloc/harmonic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "disloc/fourier.hpp"

namespace disloc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double default_tolerance(const Domain& d) {
  return d.kind() == DomainKind::UnitDisk ? 1e-8 : 1e-6;
}

// 16-point Gauss-Legendre rule on [-1, 1]
constexpr int kGn = 16;
constexpr double kGx[kGn] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGw[kGn] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

void check_data_continuity(const std::function<double(double)>& data) {
  // Adjacent-sample jumps of a continuous function shrink when the grid is
  // refined; a genuine discontinuity keeps a grid-independent jump.
  struct Jumps {
    double jump, range, scale;
  };
  auto max_jump = [&](int m) {
    double prev = data(0.0), mj = 0.0, lo = prev, hi = prev;
    for (int i = 1; i <= m; ++i) {
      const double v = data(kTwoPi * i / m);
      mj = std::max(mj, std::abs(v - prev));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      prev = v;
    }
    return Jumps{mj, hi - lo, std::max(std::abs(lo), std::abs(hi))};
  };
  const Jumps a = max_jump(2048);
  const double floor_abs = 1e-12 * (a.scale + 1.0);
  if (a.range <= floor_abs || a.jump <= std::max(1e-3 * a.range, floor_abs)) return;
  const Jumps b = max_jump(8192);
  if (b.jump > 0.6 * a.jump && b.jump > std::max(1e-3 * a.range, floor_abs))
    throw Error(ErrorCode::SolverDiverged, "boundary data fails the sampled continuity check");
}

}  // namespace

// ---------------------------------------------------------------------------
// Nystrom double-layer solver
// ---------------------------------------------------------------------------

struct NystromDirichlet::ImplData {
  Domain domain;
  int n = 0;
  double length = 0.0;
  std::vector<double> t, speed, kappa;
  std::vector<Vec2> y, nu;
  std::vector<double> matrix;  // row-major
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

NystromDirichlet::NystromDirichlet(const Domain& domain, int points, ExecutionPolicy assembly)
    : data_(std::make_unique<ImplData>()) {
  if (!domain.bounded())
    throw Error(ErrorCode::UnboundedDomain, "boundary-integral solver needs a bounded domain");
  auto& d = *data_;
  d.domain = domain;
  d.n = points;
  d.length = domain.boundary_length();
  const auto& curve = domain.curve();
  d.t.resize(points);
  d.speed.resize(points);
  d.kappa.resize(points);
  d.y.resize(points);
  d.nu.resize(points);
  for (int j = 0; j < points; ++j) {
    const double t = kTwoPi * j / points;
    d.t[j] = t;
    d.y[j] = curve.point(t);
    const Vec2 d1 = curve.deriv(t);
    d.speed[j] = d1.norm();
    const Vec2 tau = d1 / d.speed[j];
    d.nu[j] = {tau.y, -tau.x};
    d.kappa[j] = curve.curvature(t);
  }
  d.matrix.assign(static_cast<std::size_t>(points) * points, 0.0);
  const double w = kTwoPi / points;
  parallel_for(points, assembly, [&](std::int64_t i) {
    double* row = d.matrix.data() + static_cast<std::size_t>(i) * points;
    const Vec2 xi = d.y[i];
    for (int j = 0; j < points; ++j) {
      if (j == i) {
        row[j] = -0.5 - w * d.speed[i] * d.kappa[i] / (4.0 * kPi);
      } else {
        const Vec2 r = xi - d.y[j];
        row[j] = w * d.speed[j] * (d.nu[j].dot(r)) / (kTwoPi * r.norm2());
      }
    }
  });
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      d.matrix.data(), points, points);
  d.lu.compute(m);
}

NystromDirichlet::~NystromDirichlet() = default;

int NystromDirichlet::points() const { return data_->n; }
const Domain& NystromDirichlet::domain() const { return data_->domain; }
double NystromDirichlet::node_param(int j) const { return data_->t[j]; }
Vec2 NystromDirichlet::node(int j) const { return data_->y[j]; }
const std::vector<double>& NystromDirichlet::assembled_matrix() const { return data_->matrix; }

std::vector<double> NystromDirichlet::solve(const std::vector<double>& data_at_nodes) const {
  const auto& d = *data_;
  Eigen::VectorXd g(d.n);
  for (int j = 0; j < d.n; ++j) g[j] = data_at_nodes[j];
  Eigen::VectorXd phi = d.lu.solve(g);
  if (!phi.allFinite()) throw Error(ErrorCode::SolverDiverged, "linear solve produced non-finite density");
  return std::vector<double>(phi.data(), phi.data() + d.n);
}

double NystromDirichlet::eval(const std::vector<double>& density, Vec2 x) const {
  const auto& d = *data_;
  const double w = kTwoPi / d.n;
  double u = 0.0;
  for (int j = 0; j < d.n; ++j) {
    const Vec2 r = x - d.y[j];
    u += w * d.speed[j] * density[j] * d.nu[j].dot(r) / (kTwoPi * r.norm2());
  }
  return u;
}

Vec2 NystromDirichlet::eval_gradient(const std::vector<double>& density, Vec2 x) const {
  const auto& d = *data_;
  const double w = kTwoPi / d.n;
  Vec2 g{0.0, 0.0};
  for (int j = 0; j < d.n; ++j) {
    const Vec2 r = x - d.y[j];
    const double rho2 = r.norm2();
    const double c = w * d.speed[j] * density[j] / kTwoPi;
    const double nr = d.nu[j].dot(r);
    g += c * (d.nu[j] / rho2 - r * (2.0 * nr / (rho2 * rho2)));
  }
  return g;
}

double NystromDirichlet::resolve_distance() const { return 4.0 * data_->length / data_->n; }

double NystromDirichlet::eval_error_envelope(double dist_to_boundary) const {
  const auto& d = *data_;
  return std::exp(-kTwoPi * std::max(dist_to_boundary, 0.0) * d.n / d.length);
}

// ---------------------------------------------------------------------------
// HarmonicFunction backends
// ---------------------------------------------------------------------------

namespace {

class DiskFourierImpl final : public HarmonicFunction::Impl {
 public:
  DiskFourierImpl(DiskHarmonicSeries series, double residual)
      : series_(std::move(series)), residual_(residual) {}
  double value(Vec2 x) const override { return series_.value(x); }
  Vec2 gradient(Vec2 x) const override { return series_.gradient(x); }
  double error_estimate(Vec2 x) const override {
    return residual_ + series_.tail_bound(std::min(x.norm(), 1.0));
  }
  double boundary_residual() const override { return residual_; }
  const char* backend() const override { return "disk-fourier"; }

 private:
  DiskHarmonicSeries series_;
  double residual_;
};

class NystromImpl final : public HarmonicFunction::Impl {
 public:
  NystromImpl(std::shared_ptr<const NystromDirichlet> ctx, std::vector<double> density,
              double residual)
      : ctx_(std::move(ctx)), density_(std::move(density)), residual_(residual) {
    for (double v : density_) phi_max_ = std::max(phi_max_, std::abs(v));
  }
  double value(Vec2 x) const override { return ctx_->eval(density_, x); }
  Vec2 gradient(Vec2 x) const override { return ctx_->eval_gradient(density_, x); }
  double error_estimate(Vec2 x) const override {
    const double d = ctx_->domain().boundary_distance(x);
    return residual_ + phi_max_ * ctx_->eval_error_envelope(d);
  }
  double boundary_residual() const override { return residual_; }
  const char* backend() const override { return "nystrom"; }

 private:
  std::shared_ptr<const NystromDirichlet> ctx_;
  std::vector<double> density_;
  double residual_;
  double phi_max_ = 0.0;
};

// Method of fundamental solutions; sources on an offset curve strictly outside.
// Exact harmonic representation, so evaluation stays accurate up to the boundary.
class MfsImpl final : public HarmonicFunction::Impl {
 public:
  struct Setup {
    std::vector<Vec2> sources;
    std::vector<double> coeff;  // one per source
    double constant = 0.0;
    double residual = 0.0;
  };
  explicit MfsImpl(Setup s) : s_(std::move(s)) {}
  double value(Vec2 x) const override {
    double u = s_.constant;
    for (std::size_t j = 0; j < s_.sources.size(); ++j)
      u += s_.coeff[j] * std::log((x - s_.sources[j]).norm());
    return u;
  }
  Vec2 gradient(Vec2 x) const override {
    Vec2 g{0.0, 0.0};
    for (std::size_t j = 0; j < s_.sources.size(); ++j) {
      const Vec2 r = x - s_.sources[j];
      g += s_.coeff[j] / r.norm2() * r;
    }
    return g;
  }
  double error_estimate(Vec2) const override { return s_.residual; }
  double boundary_residual() const override { return s_.residual; }
  const char* backend() const override { return "mfs"; }

 private:
  Setup s_;
};

// Fourier solution of the mixed annulus problem eps < |x| < 1 on the unit disk:
// w = data on the outer circle, radial derivative zero on the inner one.
class AnnulusImpl final : public HarmonicFunction::Impl {
 public:
  AnnulusImpl(const std::vector<double>& outer_samples, double eps) : eps_(eps) {
    auto F = fft_real(outer_samples);
    const std::size_t m = outer_samples.size();
    a0_ = F[0].real() / static_cast<double>(m);
    holo_.assign(m / 2 + 1, {0.0, 0.0});
    anti_.assign(m / 2 + 1, {0.0, 0.0});
    for (std::size_t k = 1; k <= m / 2; ++k) {
      std::complex<double> ck = (k < m / 2 ? 2.0 : 1.0) * F[k] / static_cast<double>(m);
      const double ek = std::pow(eps, 2.0 * static_cast<double>(k));
      const std::complex<double> alpha = ck / (1.0 + ek);
      holo_[k] = alpha;
      anti_[k] = alpha * ek;
    }
    std::size_t keep = holo_.size();
    while (keep > 2 && std::abs(holo_[keep - 1]) < 1e-16 && std::abs(anti_[keep - 1]) < 1e-300)
      --keep;
    holo_.resize(keep);
    anti_.resize(keep);
    // boundary residual at midpoints of the sampling grid
    double res = 0.0;
    const std::size_t probes = 256;
    for (std::size_t i = 0; i < probes; ++i) {
      const double t = kTwoPi * (i + 0.5) / probes;
      const double diff = value({std::cos(t), std::sin(t)}) -
                          sample_interp(outer_samples, t);
      res = std::max(res, std::abs(diff));
    }
    residual_ = res;
  }

  double value(Vec2 x) const override {
    const std::complex<double> z(x.x, x.y);
    std::complex<double> h(0.0, 0.0);
    for (std::size_t k = holo_.size(); k-- > 1;) h = h * z + holo_[k];
    h *= z;
    const std::complex<double> zeta = 1.0 / std::conj(z);
    std::complex<double> a(0.0, 0.0);
    for (std::size_t k = anti_.size(); k-- > 1;) a = a * zeta + anti_[k];
    a *= zeta;
    return a0_ + h.real() + a.real();
  }

  Vec2 gradient(Vec2 x) const override {
    const std::complex<double> z(x.x, x.y);
    std::complex<double> hp(0.0, 0.0);
    for (std::size_t k = holo_.size(); k-- > 1;)
      hp = hp * z + static_cast<double>(k) * holo_[k];
    const std::complex<double> zbar = std::conj(z);
    const std::complex<double> zeta = 1.0 / zbar;
    std::complex<double> bp(0.0, 0.0);
    for (std::size_t k = anti_.size(); k-- > 1;)
      bp = bp * zeta + static_cast<double>(k) * anti_[k];
    // anti part: value = Re B(1/zbar); d/dzbar = -B'(zeta)/zbar^2
    const std::complex<double> q = -bp / (zbar * zbar);
    return {hp.real() + q.real(), -hp.imag() + q.imag()};
  }

  double error_estimate(Vec2) const override { return residual_; }
  double boundary_residual() const override { return residual_; }
  const char* backend() const override { return "annulus-fourier"; }

 private:
  static double sample_interp(const std::vector<double>& samples, double t) {
    // trigonometric interpolation is overkill for a residual probe; the data
    // grid is dense enough that cubic interpolation serves
    const std::size_t m = samples.size();
    const double u = t / kTwoPi * static_cast<double>(m);
    const auto idx = [&](std::ptrdiff_t i) {
      return samples[static_cast<std::size_t>(((i % static_cast<std::ptrdiff_t>(m)) + m) % m)];
    };
    const auto i0 = static_cast<std::ptrdiff_t>(std::floor(u));
    const double f = u - std::floor(u);
    const double ym1 = idx(i0 - 1), y0 = idx(i0), y1 = idx(i0 + 1), y2 = idx(i0 + 2);
    const double a = y1 - ym1, b = y2 - y0;
    return y0 + f * (0.5 * a + f * ((y1 - y0) * 3.0 - a - 0.5 * b +
                                    f * (0.5 * (a + b) + 2.0 * (y0 - y1))));
  }

  double eps_;
  double a0_ = 0.0;
  std::vector<std::complex<double>> holo_, anti_;
  double residual_ = 0.0;
};

MfsImpl::Setup mfs_fit(const Domain& dom, const std::function<double(double)>& data,
                       std::optional<std::pair<Vec2, double>> core, int n_src) {
  const auto& curve = dom.curve();
  const double off = std::min(0.5 * dom.rho_bar(), 0.25 * dom.diameter());
  MfsImpl::Setup s;
  s.sources.reserve(n_src + 64);
  for (int j = 0; j < n_src; ++j) {
    const double t = kTwoPi * j / n_src;
    const Vec2 p = curve.point(t);
    const Vec2 d1 = curve.deriv(t);
    const Vec2 nu = Vec2{d1.y, -d1.x} / d1.norm();
    s.sources.push_back(p + off * nu);
  }
  const int n_out = n_src;
  int n_in = 0;
  if (core) {
    n_in = 48;
    for (int j = 0; j < n_in; ++j) {
      const double t = kTwoPi * j / n_in;
      s.sources.push_back(core->first + 0.45 * core->second * Vec2{std::cos(t), std::sin(t)});
    }
  }
  const int n_col_out = 2 * n_out;
  const int n_col_in = core ? 2 * n_in : 0;
  const int rows = n_col_out + n_col_in;
  const int cols = static_cast<int>(s.sources.size()) + 1;  // + constant term
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (int i = 0; i < n_col_out; ++i) {
    const double t = kTwoPi * i / n_col_out;
    const Vec2 x = curve.point(t);
    for (int j = 0; j < cols - 1; ++j) A(i, j) = std::log((x - s.sources[j]).norm());
    A(i, cols - 1) = 1.0;
    b[i] = data(t);
  }
  if (core) {
    const double eps = core->second;
    for (int i = 0; i < n_col_in; ++i) {
      const double t = kTwoPi * i / n_col_in;
      const Vec2 nuhat{std::cos(t), std::sin(t)};
      const Vec2 x = core->first + eps * nuhat;
      const int row = n_col_out + i;
      for (int j = 0; j < cols - 1; ++j) {
        const Vec2 r = x - s.sources[j];
        A(row, j) = eps * nuhat.dot(r) / r.norm2();  // eps-scaled Neumann row
      }
      A(row, cols - 1) = 0.0;
      b[row] = 0.0;
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-13);
  Eigen::VectorXd c = svd.solve(b);
  if (!c.allFinite()) throw Error(ErrorCode::SolverDiverged, "MFS least-squares failed");
  s.coeff.assign(c.data(), c.data() + cols - 1);
  s.constant = c[cols - 1];

  // residual at midpoints (off the collocation grid)
  MfsImpl probe(s);
  double res = 0.0;
  for (int i = 0; i < n_col_out; ++i) {
    const double t = kTwoPi * (i + 0.5) / n_col_out;
    res = std::max(res, std::abs(probe.value(curve.point(t)) - data(t)));
  }
  if (core) {
    const double eps = core->second;
    for (int i = 0; i < n_col_in; ++i) {
      const double t = kTwoPi * (i + 0.5) / n_col_in;
      const Vec2 nuhat{std::cos(t), std::sin(t)};
      const Vec2 x = core->first + eps * nuhat;
      res = std::max(res, eps * std::abs(probe.gradient(x).dot(nuhat)));
    }
  }
  s.residual = res;
  return s;
}

HarmonicFunction solve_disk_fourier(const DirichletProblem& p, double tol) {
  for (int m = 4096; m <= 16384; m *= 2) {
    std::vector<double> samples(m);
    for (int j = 0; j < m; ++j) samples[j] = p.boundary_data(kTwoPi * j / m);
    DiskHarmonicSeries series(samples);
    double res = 0.0;
    const int probes = 512;
    for (int i = 0; i < probes; ++i) {
      const double t = kTwoPi * (i + 0.5) / probes;
      res = std::max(res, std::abs(series.value({std::cos(t), std::sin(t)}) - p.boundary_data(t)));
    }
    if (res <= tol || m == 16384) {
      if (res > tol)
        throw Error(ErrorCode::SolverDiverged, "disk Fourier solve missed the requested tolerance");
      return HarmonicFunction(std::make_shared<DiskFourierImpl>(std::move(series), res));
    }
  }
  throw Error(ErrorCode::SolverDiverged, "unreachable");
}

Vec2 interior_probe(const Domain& dom) {
  // centroid of boundary samples, nudged inward if necessary
  const auto& curve = dom.curve();
  Vec2 c{0.0, 0.0};
  const int m = 256;
  for (int i = 0; i < m; ++i) c += curve.point(kTwoPi * i / m);
  c = c / m;
  if (dom.contains(c)) return c;
  const ClosestPoint cp = dom.closest_boundary_point(c);
  return cp.bp.s - 0.5 * dom.rho_bar() * cp.bp.nu;
}

HarmonicFunction solve_nystrom(const DirichletProblem& p, double tol) {
  HarmonicFunction prev;
  double prev_probe = 0.0;
  for (int n = 1024; n <= 4096; n *= 2) {
    auto ctx = std::make_shared<NystromDirichlet>(p.domain, n);
    std::vector<double> g(n);
    for (int j = 0; j < n; ++j) g[j] = p.boundary_data(ctx->node_param(j));
    auto phi = ctx->solve(g);
    // two-level a-posteriori check at interior probes
    double probe_val = ctx->eval(phi, interior_probe(p.domain));
    if (prev.valid()) {
      const double diff = std::abs(probe_val - prev_probe);
      if (diff <= tol)
        return HarmonicFunction(std::make_shared<NystromImpl>(std::move(ctx), std::move(phi), diff));
    }
    prev = HarmonicFunction(std::make_shared<NystromImpl>(ctx, phi, tol));
    prev_probe = probe_val;
  }
  throw Error(ErrorCode::SolverDiverged, "Nystrom refinement did not converge to tolerance");
}

}  // namespace

HarmonicFunction solve_dirichlet(const DirichletProblem& problem, DirichletBackend backend) {
  if (!problem.domain.bounded())
    throw Error(ErrorCode::UnboundedDomain, "Dirichlet solver needs a bounded domain");
  check_data_continuity(problem.boundary_data);
  const double tol =
      problem.requested_tolerance > 0 ? problem.requested_tolerance : default_tolerance(problem.domain);
  if (backend == DirichletBackend::Auto)
    backend = problem.domain.kind() == DomainKind::UnitDisk ? DirichletBackend::DiskFourier
                                                            : DirichletBackend::Nystrom;
  switch (backend) {
    case DirichletBackend::DiskFourier: {
      if (problem.domain.kind() != DomainKind::UnitDisk)
        throw Error(ErrorCode::SolverDiverged, "disk Fourier backend needs the unit disk");
      return solve_disk_fourier(problem, tol);
    }
    case DirichletBackend::Nystrom:
      return solve_nystrom(problem, tol);
    case DirichletBackend::Mfs: {
      auto setup = mfs_fit(problem.domain, problem.boundary_data, std::nullopt, 256);
      if (setup.residual > tol) setup = mfs_fit(problem.domain, problem.boundary_data, std::nullopt, 512);
      if (setup.residual > tol)
        throw Error(ErrorCode::SolverDiverged, "MFS Dirichlet solve missed the requested tolerance");
      return HarmonicFunction(std::make_shared<MfsImpl>(std::move(setup)));
    }
    case DirichletBackend::Auto: break;
  }
  throw Error(ErrorCode::SolverDiverged, "unreachable");
}

HarmonicFunction solve_punctured_mixed(const PuncturedMixedProblem& problem) {
  const Domain& dom = problem.domain;
  if (!dom.bounded())
    throw Error(ErrorCode::UnboundedDomain, "punctured solver needs a bounded domain");
  const double d1 = dom.boundary_distance(problem.core_center);
  if (!dom.contains(problem.core_center) || problem.core_radius >= d1)
    throw Error(ErrorCode::CoreTouchesBoundary, "core disk must be strictly inside the domain");
  check_data_continuity(problem.outer_dirichlet_data);
  const double tol = problem.requested_tolerance > 0 ? problem.requested_tolerance
                                                     : default_tolerance(dom);

  if (dom.kind() == DomainKind::UnitDisk && problem.core_center.norm() < 1e-12) {
    const int m = 4096;
    std::vector<double> samples(m);
    for (int j = 0; j < m; ++j) samples[j] = problem.outer_dirichlet_data(kTwoPi * j / m);
    auto impl = std::make_shared<AnnulusImpl>(samples, problem.core_radius);
    if (impl->boundary_residual() > tol)
      throw Error(ErrorCode::SolverDiverged, "annulus Fourier solve missed the requested tolerance");
    return HarmonicFunction(impl);
  }
  auto core = std::make_pair(problem.core_center, problem.core_radius);
  auto setup = mfs_fit(dom, problem.outer_dirichlet_data, core, 256);
  if (setup.residual > tol) setup = mfs_fit(dom, problem.outer_dirichlet_data, core, 512);
  if (setup.residual > tol)
    throw Error(ErrorCode::SolverDiverged, "MFS mixed solve missed the requested tolerance");
  return HarmonicFunction(std::make_shared<MfsImpl>(std::move(setup)));
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

std::function<double(double)> ray_radius(const Domain& domain, Vec2 center) {
  if (!domain.bounded()) throw Error(ErrorCode::UnboundedDomain, "ray radius needs a bounded domain");
  if (!domain.contains(center)) throw Error(ErrorCode::OutsideDomain, "ray center must be interior");
  if (domain.kind() == DomainKind::UnitDisk) {
    const Vec2 c = center;
    return [c](double theta) {
      const Vec2 u{std::cos(theta), std::sin(theta)};
      const double cu = c.dot(u);
      return -cu + std::sqrt(std::max(1.0 - c.norm2() + cu * cu, 0.0));
    };
  }
  // Parametric: verify star-shapedness by checking that the boundary angle
  // seen from the center is monotone, then invert it on a grid.
  const auto& curve = domain.curve();
  const int m = 4096;
  auto grid = std::make_shared<std::vector<double>>(m + 1);
  double prev = std::atan2(curve.point(0.0).y - center.y, curve.point(0.0).x - center.x);
  (*grid)[0] = prev;
  for (int i = 1; i <= m; ++i) {
    const Vec2 p = curve.point(kTwoPi * i / m);
    double a = std::atan2(p.y - center.y, p.x - center.x);
    while (a < prev - kPi) a += kTwoPi;
    while (a > prev + kPi) a -= kTwoPi;
    if (a < prev)
      throw Error(ErrorCode::InvalidCurve, "domain is not star-shaped about the requested center");
    (*grid)[i] = a;
    prev = a;
  }
  if (std::abs((*grid)[m] - (*grid)[0] - kTwoPi) > 1e-9)
    throw Error(ErrorCode::InvalidCurve, "boundary winding about the center is not one");
  const Vec2 c = center;
  auto curve_copy = std::make_shared<FourierCurve>(curve);
  return [grid, curve_copy, c, m](double theta) {
    const double base = (*grid)[0];
    double target = theta;
    while (target < base) target += kTwoPi;
    while (target >= base + kTwoPi) target -= kTwoPi;
    auto it = std::upper_bound(grid->begin(), grid->end(), target);
    int hi = static_cast<int>(it - grid->begin());
    hi = std::clamp(hi, 1, m);
    double t_lo = kTwoPi * (hi - 1) / m, t_hi = kTwoPi * hi / m;
    const Vec2 u{std::cos(target), std::sin(target)};
    auto f = [&](double t) {
      const Vec2 r = curve_copy->point(t) - c;
      return r.cross(u);
    };
    double f_lo = f(t_lo);
    for (int it2 = 0; it2 < 60; ++it2) {
      const double tm = 0.5 * (t_lo + t_hi);
      const double fm = f(tm);
      if ((fm > 0) == (f_lo > 0)) { t_lo = tm; f_lo = fm; } else { t_hi = tm; }
    }
    return (curve_copy->point(0.5 * (t_lo + t_hi)) - c).norm();
  };
}

namespace {

double polar_pass(const std::function<double(Vec2)>& f, const PolarRegion& region, int m_theta,
                  int base_panels) {
  double total = 0.0;
  const double wt = kTwoPi / m_theta;
  for (int i = 0; i < m_theta; ++i) {
    const double theta = kTwoPi * i / m_theta;
    const double outer = region.outer(theta);
    const double inner = region.inner;
    if (!(outer > inner + 1e-14)) continue;
    const Vec2 u{std::cos(theta), std::sin(theta)};
    // panel breakpoints: geometric grading when the inner radius is tiny
    std::vector<double> brk;
    if (inner > 0.0 && outer / inner > 8.0) {
      const int p = std::max(base_panels, static_cast<int>(std::ceil(std::log2(outer / inner))));
      brk.resize(p + 1);
      const double ratio = std::pow(outer / inner, 1.0 / p);
      brk[0] = inner;
      for (int k = 1; k <= p; ++k) brk[k] = brk[k - 1] * ratio;
      brk[p] = outer;
    } else {
      brk.resize(base_panels + 1);
      for (int k = 0; k <= base_panels; ++k)
        brk[k] = inner + (outer - inner) * k / base_panels;
    }
    double line = 0.0;
    for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
      const double a = brk[k], b = brk[k + 1];
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (int q = 0; q < kGn; ++q) {
        const double rho = mid + half * kGx[q];
        line += kGw[q] * half * rho * f(region.center + rho * u);
      }
    }
    total += wt * line;
  }
  return total;
}

}  // namespace

QuadratureResult polar_quadrature(const std::function<double(Vec2)>& integrand,
                                  const PolarRegion& region, double abs_tol, int max_levels) {
  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0; level < max_levels; ++level) {
    const int m_theta = 64 << level;
    const int panels = 3 + 2 * level;
    const double val = polar_pass(integrand, region, m_theta, panels);
    if (have_prev) {
      const double err = std::abs(val - prev);
      if (err <= abs_tol) return {val, err, level + 1};
    }
    prev = val;
    have_prev = true;
  }
  throw Error(ErrorCode::QuadratureStalled, "polar quadrature missed the requested tolerance");
}

QuadratureResult energy_quadrature(const std::function<Vec2(Vec2)>& field,
                                   const PolarRegion& region, double abs_tol, int max_levels) {
  auto f = [&](Vec2 x) { return 0.5 * field(x).norm2(); };
  return polar_quadrature(f, region, abs_tol, max_levels);
}

QuadratureResult log_radius_integral(const std::function<double(double)>& outer, double inner,
                                     double abs_tol) {
  if (!(inner > 0.0)) throw Error(ErrorCode::QuadratureStalled, "log integral needs inner > 0");
  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0; level < 8; ++level) {
    const int m = 128 << level;
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double r = outer(kTwoPi * i / m);
      s += std::log(std::max(r, inner) / inner);
    }
    const double val = 0.5 * s * kTwoPi / m;
    if (have_prev && std::abs(val - prev) <= abs_tol) return {val, std::abs(val - prev), level + 1};
    prev = val;
    have_prev = true;
  }
  throw Error(ErrorCode::QuadratureStalled, "boundary log integral missed the requested tolerance");
}

}  // namespace disloc
