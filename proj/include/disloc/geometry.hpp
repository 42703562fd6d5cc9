#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "disloc/error.hpp"
#include "disloc/vec.hpp"

namespace disloc {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class DomainKind { UnitDisk, HalfPlane, FullPlane, Parametric };

// Smooth closed curve p(t), t in [0, 2pi), as a truncated Fourier series.
// p_x(t) = sum_k xc[k] cos(kt) + xs[k] sin(kt), same for y.
class FourierCurve {
 public:
  FourierCurve(std::vector<double> xc, std::vector<double> xs,
               std::vector<double> yc, std::vector<double> ys);

  Vec2 point(double t) const;
  Vec2 deriv(double t) const;
  Vec2 deriv2(double t) const;
  // signed curvature, CCW-positive
  double curvature(double t) const;
  int order() const { return order_; }
  const std::vector<double>& xc() const { return xc_; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& yc() const { return yc_; }
  const std::vector<double>& ys() const { return ys_; }

  static FourierCurve circle();                 // unit circle
  static FourierCurve ellipse(double a, double b);
  // exact cardioid p(t) = ((1+cos t)cos t, (1+cos t)sin t); cusp at t = pi
  static FourierCurve cardioid();
  // cusp replaced by a dimple: second harmonic amplitude beta < 1/2
  static FourierCurve smoothed_cardioid(double beta = 0.32);

 private:
  std::vector<double> xc_, xs_, yc_, ys_;
  int order_ = 0;
};

struct BoundaryPoint {
  Vec2 s;        // point on the boundary
  Vec2 nu;       // outward unit normal
  Vec2 tau;      // unit tangent, CCW orientation
  double param;  // curve parameter (Parametric/UnitDisk), else unused
};

struct ClosestPoint {
  BoundaryPoint bp;
  double dist = 0.0;
  bool ambiguous = false;  // multiple minimizers within tolerance (d >= rho_bar)
};

class Domain {
 public:
  Domain() = default;  // unit disk; prefer the named factories
  static Domain unit_disk();
  static Domain half_plane();  // { x2 > 0 }
  static Domain full_plane();
  static Domain parametric(FourierCurve curve);

  DomainKind kind() const { return kind_; }
  bool has_boundary() const { return kind_ != DomainKind::FullPlane; }
  bool bounded() const { return kind_ == DomainKind::UnitDisk || kind_ == DomainKind::Parametric; }
  // uniform interior/exterior disk radius (estimate for Parametric), +inf for half/full plane
  double rho_bar() const { return rho_bar_; }
  double diameter() const { return diameter_; }
  double boundary_length() const;  // bounded domains only
  bool cusp_flagged() const { return cusp_flagged_; }

  bool contains(Vec2 x) const;  // strictly inside
  ClosestPoint closest_boundary_point(Vec2 x) const;
  ClosestPoint closest_boundary_point(Vec2 x, double hint_param) const;
  double boundary_distance(Vec2 x) const;  // d_1; +inf for FullPlane

  // boundary point at curve parameter t (bounded domains)
  BoundaryPoint boundary_point(double t) const;
  const FourierCurve& curve() const;  // UnitDisk/Parametric
  Vec2 bbox_lo() const { return bbox_lo_; }
  Vec2 bbox_hi() const { return bbox_hi_; }

 private:
  void init_parametric();

  DomainKind kind_ = DomainKind::UnitDisk;
  std::optional<FourierCurve> curve_;
  double rho_bar_ = 1.0;
  double diameter_ = 2.0;
  double length_ = 0.0;
  bool cusp_flagged_ = false;
  Vec2 bbox_lo_{-1.0, -1.0}, bbox_hi_{1.0, 1.0};

  struct CurveCache {
    std::vector<double> t;
    std::vector<Vec2> p;
    std::vector<double> speed;  // |p'(t)|
  };
  std::shared_ptr<const CurveCache> cache_;
};

// minimal boundary/pair separation of a configuration (the paper's d_n)
double d_n(const Domain& dom, std::span<const Vec2> z);

struct RegionCheck {
  bool member = false;
  bool params_ok = true;
  std::string warning;  // set when parameter constraints are violated or skipped
};

// d_1(z_1) < delta and d_{n-1}(z_2..z_n) > gamma
RegionCheck in_region_D(const Domain& dom, std::span<const Vec2> z, double delta, double gamma);

// |z_1 - z_2| < zeta, d_{n-2}(z_3..) > eta, dist({z1,z2}, {z3..} u boundary) > eta
RegionCheck in_region_C(const Domain& dom, std::span<const Vec2> z, double zeta, double eta);

struct RegionD {
  int n = 1;
  double delta = 0.1;
  double gamma = 0.5;
};
struct RegionC {
  int n = 2;
  double zeta = 0.1;
  double eta = 0.5;
};
using RegionSpec = std::variant<RegionD, RegionC>;

struct SampleStats {
  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;
  double acceptance_rate = 0.0;
};

// Rejection sampling of configurations in a regime set; deterministic per seed.
std::vector<std::vector<Vec2>> sample_interior(const Domain& dom, const RegionSpec& region,
                                               int count, std::uint64_t seed,
                                               SampleStats* stats = nullptr);

}  // namespace disloc
