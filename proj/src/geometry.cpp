#include "disloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "disloc/rng.hpp"

namespace disloc {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kCurveGrid = 4096;           // coarse grid for closest-point search
constexpr std::uint64_t kSampleCap = 10'000'000;  // rejection-sampling attempt cap
}  // namespace

FourierCurve::FourierCurve(std::vector<double> xc, std::vector<double> xs,
                           std::vector<double> yc, std::vector<double> ys)
    : xc_(std::move(xc)), xs_(std::move(xs)), yc_(std::move(yc)), ys_(std::move(ys)) {
  std::size_t n = std::max({xc_.size(), xs_.size(), yc_.size(), ys_.size()});
  if (n == 0) throw Error(ErrorCode::InvalidCurve, "empty coefficient set");
  xc_.resize(n, 0.0);
  xs_.resize(n, 0.0);
  yc_.resize(n, 0.0);
  ys_.resize(n, 0.0);
  order_ = static_cast<int>(n) - 1;
}

Vec2 FourierCurve::point(double t) const {
  double x = 0.0, y = 0.0;
  for (int k = 0; k <= order_; ++k) {
    const double c = std::cos(k * t), s = std::sin(k * t);
    x += xc_[k] * c + xs_[k] * s;
    y += yc_[k] * c + ys_[k] * s;
  }
  return {x, y};
}

Vec2 FourierCurve::deriv(double t) const {
  double x = 0.0, y = 0.0;
  for (int k = 1; k <= order_; ++k) {
    const double c = std::cos(k * t), s = std::sin(k * t);
    x += k * (-xc_[k] * s + xs_[k] * c);
    y += k * (-yc_[k] * s + ys_[k] * c);
  }
  return {x, y};
}

Vec2 FourierCurve::deriv2(double t) const {
  double x = 0.0, y = 0.0;
  for (int k = 1; k <= order_; ++k) {
    const double c = std::cos(k * t), s = std::sin(k * t);
    x += -k * k * (xc_[k] * c + xs_[k] * s);
    y += -k * k * (yc_[k] * c + ys_[k] * s);
  }
  return {x, y};
}

double FourierCurve::curvature(double t) const {
  const Vec2 d1 = deriv(t), d2 = deriv2(t);
  const double sp = d1.norm();
  return d1.cross(d2) / (sp * sp * sp);
}

FourierCurve FourierCurve::circle() { return FourierCurve({0, 1}, {0, 0}, {0, 0}, {0, 1}); }

FourierCurve FourierCurve::ellipse(double a, double b) {
  if (a <= 0 || b <= 0) throw Error(ErrorCode::InvalidCurve, "ellipse semi-axes must be positive");
  return FourierCurve({0, a}, {0, 0}, {0, 0}, {0, b});
}

FourierCurve FourierCurve::cardioid() {
  // (1+cos t)(cos t, sin t) = (1/2 + cos t + cos 2t / 2, sin t + sin 2t / 2)
  return FourierCurve({0.5, 1.0, 0.5}, {0, 0, 0}, {0, 0, 0}, {0, 1.0, 0.5});
}

FourierCurve FourierCurve::smoothed_cardioid(double beta) {
  if (beta < 0.0 || beta >= 0.5)
    throw Error(ErrorCode::InvalidCurve, "smoothed cardioid requires 0 <= beta < 1/2");
  return FourierCurve({0.5, 1.0, beta}, {0, 0, 0}, {0, 0, 0}, {0, 1.0, beta});
}

Domain Domain::unit_disk() {
  Domain d;
  d.kind_ = DomainKind::UnitDisk;
  d.curve_ = FourierCurve::circle();
  d.rho_bar_ = 1.0;
  d.diameter_ = 2.0;
  d.length_ = 2.0 * kPi;
  d.bbox_lo_ = {-1.0, -1.0};
  d.bbox_hi_ = {1.0, 1.0};
  return d;
}

Domain Domain::half_plane() {
  Domain d;
  d.kind_ = DomainKind::HalfPlane;
  d.rho_bar_ = kInf;
  d.diameter_ = kInf;
  d.bbox_lo_ = {-kInf, 0.0};
  d.bbox_hi_ = {kInf, kInf};
  return d;
}

Domain Domain::full_plane() {
  Domain d;
  d.kind_ = DomainKind::FullPlane;
  d.rho_bar_ = kInf;
  d.diameter_ = kInf;
  d.bbox_lo_ = {-kInf, -kInf};
  d.bbox_hi_ = {kInf, kInf};
  return d;
}

Domain Domain::parametric(FourierCurve curve) {
  Domain d;
  d.kind_ = DomainKind::Parametric;
  d.curve_ = std::move(curve);
  d.init_parametric();
  return d;
}

namespace {
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return (q - p).cross(r - p); };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}
}  // namespace

void Domain::init_parametric() {
  const auto& c = *curve_;
  auto cache = std::make_shared<CurveCache>();
  cache->t.resize(kCurveGrid);
  cache->p.resize(kCurveGrid);
  cache->speed.resize(kCurveGrid);
  double min_speed = kInf, max_speed = 0.0;
  double length = 0.0;
  Vec2 lo{kInf, kInf}, hi{-kInf, -kInf};
  for (int i = 0; i < kCurveGrid; ++i) {
    const double t = 2.0 * kPi * i / kCurveGrid;
    cache->t[i] = t;
    cache->p[i] = c.point(t);
    const Vec2 d1 = c.deriv(t);
    cache->speed[i] = d1.norm();
    min_speed = std::min(min_speed, cache->speed[i]);
    max_speed = std::max(max_speed, cache->speed[i]);
    length += cache->speed[i];
    lo.x = std::min(lo.x, cache->p[i].x);
    lo.y = std::min(lo.y, cache->p[i].y);
    hi.x = std::max(hi.x, cache->p[i].x);
    hi.y = std::max(hi.y, cache->p[i].y);
  }
  length *= 2.0 * kPi / kCurveGrid;
  // shoelace over the sampled polygon
  double area2 = 0.0;
  for (int i = 0; i < kCurveGrid; ++i) {
    const Vec2 a = cache->p[i], b = cache->p[(i + 1) % kCurveGrid];
    area2 += a.cross(b);
  }
  if (area2 <= 0.0)
    throw Error(ErrorCode::InvalidCurve, "boundary curve must be traversed counterclockwise");

  cusp_flagged_ = min_speed < 1e-6 * max_speed;

  // simplicity check on a coarse polyline (non-adjacent segment pairs)
  const int m = 512;
  std::vector<Vec2> poly(m);
  for (int i = 0; i < m; ++i) poly[i] = c.point(2.0 * kPi * i / m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % m], poly[j], poly[(j + 1) % m]))
        throw Error(ErrorCode::InvalidCurve, "boundary curve is self-intersecting");
    }
  }

  // rho_bar: min radius of curvature over the grid, halved as a safety factor;
  // near-cusp nodes (tiny |p'|) are excluded and flagged instead.
  double min_rc = kInf;
  for (int i = 0; i < kCurveGrid; ++i) {
    if (cache->speed[i] < 1e-3 * max_speed) continue;
    const double t = cache->t[i];
    const Vec2 d1 = c.deriv(t), d2 = c.deriv2(t);
    const double denom = std::abs(d1.cross(d2));
    if (denom < 1e-14) continue;  // locally straight
    const double rc = std::pow(cache->speed[i], 3) / denom;
    min_rc = std::min(min_rc, rc);
  }
  rho_bar_ = 0.5 * min_rc;

  double diam = 0.0;
  const int dstep = 8;
  for (int i = 0; i < kCurveGrid; i += dstep)
    for (int j = i + dstep; j < kCurveGrid; j += dstep)
      diam = std::max(diam, dist(cache->p[i], cache->p[j]));
  diameter_ = diam;
  length_ = length;
  bbox_lo_ = lo;
  bbox_hi_ = hi;
  cache_ = std::move(cache);
}

double Domain::boundary_length() const {
  if (!bounded()) throw Error(ErrorCode::UnboundedDomain, "boundary length undefined");
  return kind_ == DomainKind::UnitDisk ? 2.0 * kPi : length_;
}

const FourierCurve& Domain::curve() const {
  if (!curve_) throw Error(ErrorCode::NoBoundary, "domain has no boundary curve");
  return *curve_;
}

BoundaryPoint Domain::boundary_point(double t) const {
  const auto& c = curve();
  const Vec2 p = c.point(t);
  const Vec2 d1 = c.deriv(t);
  const Vec2 tau = d1.normalized();
  return {p, {tau.y, -tau.x}, tau, t};
}

bool Domain::contains(Vec2 x) const {
  switch (kind_) {
    case DomainKind::UnitDisk: return x.norm2() < 1.0;
    case DomainKind::HalfPlane: return x.y > 0.0;
    case DomainKind::FullPlane: return true;
    case DomainKind::Parametric: {
      if (x.x <= bbox_lo_.x || x.x >= bbox_hi_.x || x.y <= bbox_lo_.y || x.y >= bbox_hi_.y)
        return false;
      const ClosestPoint cp = closest_boundary_point(x);
      return (x - cp.bp.s).dot(cp.bp.nu) < 0.0;
    }
  }
  return false;
}

double Domain::boundary_distance(Vec2 x) const {
  switch (kind_) {
    case DomainKind::UnitDisk: return std::abs(1.0 - x.norm());
    case DomainKind::HalfPlane: return std::abs(x.y);
    case DomainKind::FullPlane: return kInf;
    case DomainKind::Parametric: return closest_boundary_point(x).dist;
  }
  return kInf;
}

namespace {
// Newton refinement of phi(t) = |x - p(t)|^2 with bisection safeguard.
double refine_param(const FourierCurve& c, Vec2 x, double t, double t_lo, double t_hi) {
  auto dphi = [&](double s) { return -2.0 * (x - c.point(s)).dot(c.deriv(s)); };
  double g_lo = dphi(t_lo), g_hi = dphi(t_hi);
  for (int it = 0; it < 80; ++it) {
    const Vec2 p = c.point(t), d1 = c.deriv(t), d2 = c.deriv2(t);
    const double g = -2.0 * (x - p).dot(d1);
    if (std::abs(g) < 1e-12) return t;
    const double h = 2.0 * (d1.dot(d1) - (x - p).dot(d2));
    double tn = (h > 0.0) ? t - g / h : std::numeric_limits<double>::quiet_NaN();
    if (!(tn > t_lo && tn < t_hi)) {
      // bisection fallback on the bracket, if it is a sign-change bracket
      if (g_lo < 0.0 && g_hi > 0.0) {
        if (g > 0.0) { t_hi = t; g_hi = g; } else { t_lo = t; g_lo = g; }
        tn = 0.5 * (t_lo + t_hi);
      } else {
        return t;  // flat or degenerate bracket: keep the best point found
      }
    }
    if (std::abs(tn - t) < 1e-15) return tn;
    t = tn;
  }
  return t;
}
}  // namespace

ClosestPoint Domain::closest_boundary_point(Vec2 x) const {
  switch (kind_) {
    case DomainKind::FullPlane:
      throw Error(ErrorCode::NoBoundary, "full plane has no boundary");
    case DomainKind::HalfPlane: {
      BoundaryPoint bp{{x.x, 0.0}, {0.0, -1.0}, {1.0, 0.0}, x.x};
      return {bp, std::abs(x.y), false};
    }
    case DomainKind::UnitDisk: {
      const double r = x.norm();
      if (r < 1e-14) {
        BoundaryPoint bp{{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, 0.0};
        return {bp, 1.0, true};  // center: every boundary point minimizes
      }
      const Vec2 s = x / r;
      BoundaryPoint bp{s, s, s.perp(), std::atan2(s.y, s.x)};
      return {bp, std::abs(1.0 - r), false};
    }
    case DomainKind::Parametric: {
      const auto& cache = *cache_;
      // coarse scan, then local refinement in the winning cell
      int best = 0;
      double best_d2 = kInf;
      for (int i = 0; i < kCurveGrid; ++i) {
        const double d2 = (x - cache.p[i]).norm2();
        if (d2 < best_d2) { best_d2 = d2; best = i; }
      }
      const double h = 2.0 * kPi / kCurveGrid;
      const double t0 = cache.t[best];
      const double t = refine_param(*curve_, x, t0, t0 - h, t0 + h);
      BoundaryPoint bp = boundary_point(t);
      const double d = dist(x, bp.s);
      // ambiguity: another coarse minimum at comparable distance far away in parameter
      bool ambiguous = false;
      if (d >= rho_bar_) {
        for (int i = 0; i < kCurveGrid; ++i) {
          int sep = std::abs(i - best);
          sep = std::min(sep, kCurveGrid - sep);
          if (sep < kCurveGrid / 16) continue;
          if (std::sqrt((x - cache.p[i]).norm2()) < d * (1.0 + 1e-6) + 1e-12) {
            ambiguous = true;
            break;
          }
        }
      }
      return {bp, d, ambiguous};
    }
  }
  throw Error(ErrorCode::NoBoundary, "unreachable");
}

ClosestPoint Domain::closest_boundary_point(Vec2 x, double hint_param) const {
  if (kind_ != DomainKind::Parametric) return closest_boundary_point(x);
  const double h = 2.0 * kPi / 64.0;
  const double t = refine_param(*curve_, x, hint_param, hint_param - h, hint_param + h);
  BoundaryPoint bp = boundary_point(t);
  const double d = dist(x, bp.s);
  // accept the warm-started solution only if it is a genuine local minimum
  const Vec2 d1 = curve_->deriv(t);
  if (std::abs((x - bp.s).dot(d1)) < 1e-9 * (1.0 + d1.norm2())) return {bp, d, false};
  return closest_boundary_point(x);
}

double d_n(const Domain& dom, std::span<const Vec2> z) {
  if (z.empty()) throw Error(ErrorCode::EmptyConfiguration, "d_n needs at least one point");
  double m = kInf;
  for (const Vec2& p : z) m = std::min(m, dom.boundary_distance(p));
  if (z.size() >= 2) {
    for (std::size_t i = 0; i < z.size(); ++i)
      for (std::size_t j = i + 1; j < z.size(); ++j) m = std::min(m, dist(z[i], z[j]));
  }
  return m;
}

RegionCheck in_region_D(const Domain& dom, std::span<const Vec2> z, double delta, double gamma) {
  if (z.empty()) throw Error(ErrorCode::EmptyConfiguration, "region D needs n >= 1");
  RegionCheck rc;
  if (!(delta > 0.0) || !(gamma > 0.0)) {
    rc.params_ok = false;
    rc.warning = "InvalidRegime: delta and gamma must be positive";
  } else if (dom.bounded()) {
    if (delta >= dom.rho_bar()) {
      rc.params_ok = false;
      rc.warning = "InvalidRegime: delta must be below sigma * rho_bar";
    } else if (!(gamma > std::max(2.0 * delta, dom.rho_bar()) && gamma < dom.diameter() / 2.0)) {
      rc.params_ok = false;
      rc.warning = "InvalidRegime: gamma outside (max{2 delta, rho_bar}, diam/2)";
    }
  } else {
    rc.warning = "regime checks involving diam/rho_bar skipped on unbounded domain";
  }
  const bool first = dom.boundary_distance(z[0]) < delta;
  bool rest = true;
  if (z.size() >= 2) rest = d_n(dom, z.subspan(1)) > gamma;
  rc.member = first && rest;
  return rc;
}

RegionCheck in_region_C(const Domain& dom, std::span<const Vec2> z, double zeta, double eta) {
  if (z.size() < 2) throw Error(ErrorCode::EmptyConfiguration, "region C needs n >= 2");
  RegionCheck rc;
  if (!(zeta > 0.0) || !(eta > 0.0) || !(zeta < eta)) {
    rc.params_ok = false;
    rc.warning = "InvalidRegime: need 0 < zeta < eta";
  }
  if (!dom.bounded() && rc.warning.empty())
    rc.warning = "boundary separation check skipped on unbounded domain";

  bool ok = dist(z[0], z[1]) < zeta;
  if (ok && z.size() > 2) ok = d_n(dom, z.subspan(2)) > eta;
  if (ok) {
    for (int i = 0; i < 2 && ok; ++i) {
      if (dom.has_boundary()) ok = dom.boundary_distance(z[i]) > eta;
      for (std::size_t j = 2; j < z.size() && ok; ++j) ok = dist(z[i], z[j]) > eta;
    }
  }
  rc.member = ok;
  return rc;
}

std::vector<std::vector<Vec2>> sample_interior(const Domain& dom, const RegionSpec& region,
                                               int count, std::uint64_t seed, SampleStats* stats) {
  if (!dom.bounded())
    throw Error(ErrorCode::UnboundedDomain, "rejection sampling needs a bounded domain");
  const int n = std::visit([](const auto& r) { return r.n; }, region);
  if (n < 1) throw Error(ErrorCode::EmptyConfiguration, "region needs n >= 1");

  Rng rng(seed);
  const Vec2 lo = dom.bbox_lo(), hi = dom.bbox_hi();
  auto draw_point = [&]() {
    for (;;) {
      Vec2 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
      if (dom.contains(p)) return p;
    }
  };
  auto accept = [&](const std::vector<Vec2>& z) {
    if (std::holds_alternative<RegionD>(region)) {
      const auto& r = std::get<RegionD>(region);
      return in_region_D(dom, z, r.delta, r.gamma).member;
    }
    const auto& r = std::get<RegionC>(region);
    return in_region_C(dom, z, r.zeta, r.eta).member;
  };

  std::vector<std::vector<Vec2>> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  std::uint64_t attempts = 0;
  while (out.size() < static_cast<std::size_t>(count)) {
    if (attempts >= kSampleCap) {
      if (stats) {
        stats->attempts = attempts;
        stats->accepted = out.size();
        stats->acceptance_rate = static_cast<double>(out.size()) / static_cast<double>(attempts);
      }
      throw Error(ErrorCode::RegionEmptyOrThin, "rejection acceptance rate below cap threshold");
    }
    ++attempts;
    std::vector<Vec2> z(n);
    for (int i = 0; i < n; ++i) z[i] = draw_point();
    if (accept(z)) out.push_back(std::move(z));
  }
  if (stats) {
    stats->attempts = attempts;
    stats->accepted = out.size();
    stats->acceptance_rate =
        attempts ? static_cast<double>(out.size()) / static_cast<double>(attempts) : 0.0;
  }
  return out;
}

}  // namespace disloc
