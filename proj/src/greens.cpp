#include "disloc/greens.hpp"

#include <bit>
#include <cmath>
#include <list>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <unordered_map>

namespace disloc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_inside(const Domain& dom, Vec2 p, const char* what) {
  if (!dom.contains(p)) throw Error(ErrorCode::OutsideDomain, what);
}

// ---- method of images -----------------------------------------------------

// unit disk: k(x,y) = (1/4pi) log(|x|^2 |y|^2 - 2 x.y + 1), symmetric and
// regular through y = 0 (the image recedes to infinity)
KernelEvaluation disk_k(Vec2 x, Vec2 y) {
  const double q = x.norm2() * y.norm2() - 2.0 * x.dot(y) + 1.0;
  KernelEvaluation e;
  e.value = std::log(q) / (4.0 * kPi);
  e.gradient_x = (y.norm2() * x - y) / (kTwoPi * q);
  return e;
}

KernelEvaluation disk_h(Vec2 x) {
  const double s = 1.0 - x.norm2();
  KernelEvaluation e;
  e.value = std::log(s) / kTwoPi;
  e.gradient_x = (-1.0 / (kPi * s)) * x;
  return e;
}

// half plane {x2 > 0}: image across the boundary line
KernelEvaluation half_plane_k(Vec2 x, Vec2 y) {
  const Vec2 ybar{y.x, -y.y};
  const Vec2 r = x - ybar;
  KernelEvaluation e;
  e.value = std::log(r.norm()) / kTwoPi;
  e.gradient_x = r / (kTwoPi * r.norm2());
  return e;
}

KernelEvaluation half_plane_h(Vec2 x) {
  KernelEvaluation e;
  e.value = std::log(2.0 * x.y) / kTwoPi;
  e.gradient_x = {0.0, 1.0 / (kTwoPi * x.y)};
  return e;
}

struct PointKey {
  std::uint64_t a, b;
  bool operator==(const PointKey&) const = default;
};
struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const {
    std::uint64_t h = k.a * 0x9e3779b97f4a7c15ULL ^ (k.b + 0x7f4a7c15ULL);
    h ^= h >> 33;
    return static_cast<std::size_t>(h);
  }
};
PointKey make_key(Vec2 p) {
  return {std::bit_cast<std::uint64_t>(p.x), std::bit_cast<std::uint64_t>(p.y)};
}

}  // namespace

struct GreensEvaluator::ImplData {
  Domain domain;
  GreensOptions opts;
  bool analytic = true;
  std::shared_ptr<const NystromDirichlet> ctx;

  // read-mostly density cache keyed by the source point
  mutable std::shared_mutex mutex;
  mutable std::unordered_map<PointKey, std::shared_ptr<const std::vector<double>>, PointKeyHash>
      cache;
  mutable std::list<PointKey> order;  // eviction order (insertion)

  std::shared_ptr<const std::vector<double>> density_for(Vec2 y) const {
    const PointKey key = make_key(y);
    if (opts.cache_densities) {
      std::shared_lock lock(mutex);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    const int n = ctx->points();
    std::vector<double> data(n);
    for (int j = 0; j < n; ++j)
      data[j] = std::log((ctx->node(j) - y).norm()) / kTwoPi;
    auto phi = std::make_shared<const std::vector<double>>(ctx->solve(data));
    if (opts.cache_densities) {
      std::unique_lock lock(mutex);
      if (cache.size() >= opts.cache_capacity && !order.empty()) {
        cache.erase(order.front());
        order.pop_front();
      }
      if (cache.emplace(key, phi).second) order.push_back(key);
    }
    return phi;
  }

  double envelope(Vec2 p) const {
    return ctx->eval_error_envelope(domain.boundary_distance(p));
  }
};

GreensEvaluator::GreensEvaluator(Domain domain, GreensOptions options)
    : data_(std::make_unique<ImplData>()) {
  data_->domain = std::move(domain);
  data_->opts = options;
  const DomainKind kind = data_->domain.kind();
  const bool has_images = kind != DomainKind::Parametric;
  bool numeric = options.method == KernelMethod::Numeric || kind == DomainKind::Parametric;
  if (options.method == KernelMethod::Analytic && kind == DomainKind::Parametric)
    throw Error(ErrorCode::SolverDiverged, "no analytic kernels for parametric domains");
  if (numeric && !data_->domain.bounded())
    throw Error(ErrorCode::UnboundedDomain, "numeric kernels need a bounded domain");
  data_->analytic = has_images && !numeric;
  if (!data_->analytic)
    data_->ctx = std::make_shared<NystromDirichlet>(data_->domain, options.nystrom_points,
                                                    options.assembly_policy);
}

GreensEvaluator::~GreensEvaluator() = default;

const Domain& GreensEvaluator::domain() const { return data_->domain; }
bool GreensEvaluator::analytic() const { return data_->analytic; }
const NystromDirichlet* GreensEvaluator::nystrom() const { return data_->ctx.get(); }
void GreensEvaluator::clear_cache() const {
  std::unique_lock lock(data_->mutex);
  data_->cache.clear();
  data_->order.clear();
}

KernelEvaluation GreensEvaluator::k(Vec2 x, Vec2 y) const {
  const Domain& dom = data_->domain;
  if (dom.kind() == DomainKind::FullPlane) return {};  // k == 0 by convention
  require_inside(dom, x, "k: x outside the domain");
  require_inside(dom, y, "k: y outside the domain");
  if (data_->analytic) {
    return dom.kind() == DomainKind::UnitDisk ? disk_k(x, y) : half_plane_k(x, y);
  }
  auto phi = data_->density_for(y);
  KernelEvaluation e;
  e.source = KernelSource::NumericSolve;
  e.value = data_->ctx->eval(*phi, x);
  e.gradient_x = data_->ctx->eval_gradient(*phi, x);
  double phi_max = 0.0;
  for (double v : *phi) phi_max = std::max(phi_max, std::abs(v));
  e.error_estimate = phi_max * (data_->envelope(x) + data_->envelope(y)) + 1e-12;
  return e;
}

KernelEvaluation GreensEvaluator::h(Vec2 x) const {
  const Domain& dom = data_->domain;
  if (dom.kind() == DomainKind::FullPlane) return {};  // no boundary: 0 by convention
  require_inside(dom, x, "h: x outside the domain");
  if (data_->analytic)
    return dom.kind() == DomainKind::UnitDisk ? disk_h(x) : half_plane_h(x);
  // h(x) = k(x, x); by symmetry of k, grad h = 2 grad_x k(x, y)|_{y=x}
  KernelEvaluation e = k(x, x);
  e.gradient_x = 2.0 * e.gradient_x;
  e.error_estimate *= 2.0;
  return e;
}

KernelEvaluation GreensEvaluator::green(Vec2 x, Vec2 y) const {
  const Domain& dom = data_->domain;
  const Vec2 r = x - y;
  if (r.norm() < 1e-14)
    throw Error(ErrorCode::CoincidentPoints, "Green's function is singular on the diagonal");
  KernelEvaluation e = k(x, y);
  e.value += -std::log(r.norm()) / kTwoPi;
  e.gradient_x += -r / (kTwoPi * r.norm2());
  return e;
}

KernelEvaluation k_omega(const Domain& domain, Vec2 x, Vec2 y) {
  return GreensEvaluator(domain).k(x, y);
}
KernelEvaluation h_omega(const Domain& domain, Vec2 x) { return GreensEvaluator(domain).h(x); }
KernelEvaluation green(const Domain& domain, Vec2 x, Vec2 y) {
  return GreensEvaluator(domain).green(x, y);
}

}  // namespace disloc
