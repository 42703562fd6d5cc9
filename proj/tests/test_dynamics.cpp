#include <doctest.h>

#include <cmath>
#include <numbers>

#include "disloc/dynamics.hpp"
#include "disloc/rng.hpp"

using namespace disloc;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// closed-form boundary hit time for one dislocation on the disk started at r0:
// dr/dt = r / (2 pi (1 - r^2)) integrates to T = 2 pi (r0^2/2 - log r0 - 1/2)
double disk_hit_time(double r0) { return kTwoPi * (r0 * r0 / 2.0 - std::log(r0) - 0.5); }
}  // namespace

TEST_CASE("disk single dislocation hits the boundary at the separable-ODE time") {
  const Trajectory traj = integrate(Domain::unit_disk(), {{{0.8, 0.0}}, {1}}, 5.0);
  REQUIRE(traj.terminated_by_event());
  const Event& e = traj.events.back();
  REQUIRE(std::holds_alternative<BoundaryHit>(e.kind));
  const auto& hit = std::get<BoundaryHit>(e.kind);
  CHECK(hit.where.s.x == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(hit.where.s.y) <= 1e-6);
  CHECK(e.time == doctest::Approx(disk_hit_time(0.8)).epsilon(1e-5));
}

TEST_CASE("half plane single dislocation: T = 2 pi d^2") {
  const Trajectory traj = integrate(Domain::half_plane(), {{{0.0, 0.5}}, {1}}, 5.0);
  REQUIRE(traj.terminated_by_event());
  const Event& e = traj.events.back();
  REQUIRE(std::holds_alternative<BoundaryHit>(e.kind));
  CHECK(e.time == doctest::Approx(kPi / 2.0).epsilon(1e-6));
  CHECK(std::abs(std::get<BoundaryHit>(e.kind).where.s.x) <= 1e-8);
}

TEST_CASE("plane dipole collides at T = pi s0^2 / 2 at the midpoint") {
  const double s0 = 0.1;
  const Trajectory traj =
      integrate(Domain::full_plane(), {{{0.05, 0.0}, {-0.05, 0.0}}, {+1, -1}}, 1.0);
  REQUIRE(traj.terminated_by_event());
  const Event& e = traj.events.back();
  REQUIRE(std::holds_alternative<DipoleCollision>(e.kind));
  CHECK(e.time == doctest::Approx(kPi * s0 * s0 / 2.0).epsilon(1e-6));
  CHECK(std::get<DipoleCollision>(e.kind).location.norm() <= 1e-9);
}

TEST_CASE("energy decreases along trajectories and recorded speeds equal forces") {
  GreensEvaluator g(Domain::unit_disk());
  const Trajectory traj = integrate(g, {{{0.5, 0.2}, {-0.3, 0.1}}, {+1, -1}}, 3.0);
  REQUIRE(traj.energies.size() == traj.times.size());
  for (std::size_t k = 1; k < traj.energies.size(); ++k)
    CHECK(traj.energies[k] <= traj.energies[k - 1] + 1e-7 * (1.0 + std::abs(traj.energies[k])));
  // velocities stored with each sample are the Peach-Koehler forces there
  for (std::size_t k = 0; k < traj.times.size(); k += 7) {
    DislocationSystem sys;
    std::vector<int> idx;
    for (std::size_t i = 0; i < traj.burgers.size(); ++i) {
      if (!std::isfinite(traj.positions[k][i].x)) continue;
      sys.z.push_back(traj.positions[k][i]);
      sys.b.push_back(traj.burgers[i]);
      idx.push_back(static_cast<int>(i));
    }
    const auto rep = peach_koehler(g, sys);
    for (std::size_t a = 0; a < idx.size(); ++a)
      CHECK((rep.f[a] - traj.velocities[k][idx[a]]).norm() <= 1e-9 * (1.0 + rep.f[a].norm()));
  }
  // positions are consistent with the stored velocities across small steps
  for (std::size_t k = 1; k + 1 < traj.times.size(); k += 5) {
    const double dt = traj.times[k + 1] - traj.times[k - 1];
    if (dt > 1e-3) continue;
    for (std::size_t i = 0; i < traj.burgers.size(); ++i) {
      const Vec2 fd = (traj.positions[k + 1][i] - traj.positions[k - 1][i]) / dt;
      CHECK((fd - traj.velocities[k][i]).norm() <= 0.2 * (1.0 + traj.velocities[k][i].norm()));
    }
  }
}

TEST_CASE("same-sign pairs repel and never trigger collision events") {
  const Trajectory traj =
      integrate(Domain::full_plane(), {{{0.1, 0.0}, {-0.1, 0.0}}, {+1, +1}}, 0.5);
  CHECK(traj.events.empty());
  double prev = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double sep = dist(traj.positions[k][0], traj.positions[k][1]);
    if (k) CHECK(sep > prev - 1e-12);
    prev = sep;
  }
}

TEST_CASE("integrator tolerance controls the terminal-time error") {
  const double exact = disk_hit_time(0.8);
  double errs[3];
  int i = 0;
  for (double tol : {1e-5, 1e-7, 1e-9}) {
    IntegrateOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-2;
    const Trajectory t = integrate(Domain::unit_disk(), {{{0.8, 0.0}}, {1}}, 5.0, opt);
    errs[i++] = std::abs(t.events.back().time - exact);
  }
  CHECK(errs[2] <= errs[0] + 1e-12);
  CHECK(errs[2] <= 1e-7);
}

TEST_CASE("theorem 2 bound prediction on disk and half plane") {
  GreensEvaluator disk(Domain::unit_disk());
  // paper scale at delta0 = 0.2: 2 pi delta0^2 = 0.2513...
  DislocationSystem sys{{{0.85, 0.0}}, {1}};
  const auto bp = predict_theorem2(disk, sys, 0.2, 0.5);
  CHECK(bp.predicted_upper == doctest::Approx(0.251327412287).epsilon(1e-12));
  CHECK(bp.event_kind_matches);
  CHECK(bp.satisfied_leading_order);
  CHECK(bp.measured <= bp.predicted_upper * 1.2);

  // sweep: measured / delta^2 approaches 2 pi within 5% at delta = 0.025
  for (double delta : {0.1, 0.05, 0.025}) {
    DislocationSystem s{{{1.0 - delta, 0.0}}, {1}};
    const auto b = predict_theorem2(disk, s, delta * 1.0001, 0.5);
    const double ratio = b.measured / (delta * delta);
    if (delta <= 0.025) CHECK(std::abs(ratio - kTwoPi) <= 0.05 * kTwoPi);
    CHECK(b.measured <= kTwoPi * delta * delta * 1.2);
  }

  // half plane: the bound is tight (T = 2 pi delta^2 exactly)
  GreensEvaluator half(Domain::half_plane());
  DislocationSystem hs{{{0.0, 0.3}}, {1}};
  const auto bh = predict_theorem2(half, hs, 0.3 * 1.0001, 1.0);
  CHECK(bh.measured == doctest::Approx(kTwoPi * 0.09).epsilon(1e-5));
}

TEST_CASE("theorem 2 regime persistence: first event is a boundary hit of index 0") {
  GreensEvaluator g(Domain::unit_disk());
  const auto cfgs = sample_interior(Domain::unit_disk(), RegionD{2, 0.05, 0.5}, 12, 99);
  for (const auto& z : cfgs) {
    const Trajectory t = integrate(g, {z, {+1, -1}}, 10.0);
    REQUIRE(t.terminated_by_event());
    const Event& e = t.events.back();
    REQUIRE(std::holds_alternative<BoundaryHit>(e.kind));
    CHECK(std::get<BoundaryHit>(e.kind).index == 0);
    // the other dislocation is still strictly interior at the hit
    const Vec2 other = t.positions.back()[1];
    CHECK(Domain::unit_disk().boundary_distance(other) > 0.05);
  }
}

TEST_CASE("theorem 3 bound prediction") {
  // plane dipole with eta -> inf reduces to pi zeta^2 / 2
  GreensEvaluator plane(Domain::full_plane());
  DislocationSystem dip{{{0.05, 0.0}, {-0.05, 0.0}}, {+1, -1}};
  const auto bp = predict_theorem3(plane, dip, 0.1 * 1.0001, kInf);
  CHECK(bp.predicted_upper == doctest::Approx(kPi * 0.01 / 2.0).epsilon(2e-4));
  CHECK(bp.measured == doctest::Approx(kPi * 0.01 / 2.0).epsilon(1e-4));
  CHECK(bp.satisfied_leading_order);

  // disk dipole: measured below the bound
  GreensEvaluator disk(Domain::unit_disk());
  DislocationSystem dd{{{0.05, 0.0}, {-0.05, 0.0}}, {+1, -1}};
  const auto bd = predict_theorem3(disk, dd, 0.12, 0.5);
  const double denom = 0.25 - 0.12 * 0.12;
  CHECK(bd.predicted_upper == doctest::Approx(kPi * 0.0144 * 0.25 / (2 * denom)).epsilon(1e-12));
  CHECK(bd.measured <= bd.predicted_upper);
  CHECK(bd.event_kind_matches);

  // nonpositive denominator: zeta = eta
  CHECK_THROWS_AS(predict_theorem3(disk, dd, 0.5, 0.5), Error);
}

TEST_CASE("annihilation removes the pair and the rest keeps evolving") {
  IntegrateOptions opt;
  opt.on_collision = CollisionPolicy::Annihilate;
  // a tight dipole plus a far same-sign pair on the plane
  DislocationSystem sys{{{0.03, 0.0}, {-0.03, 0.0}, {3.0, 0.0}, {5.0, 0.0}}, {+1, -1, +1, +1}};
  const Trajectory t = integrate(Domain::full_plane(), sys, 0.3, opt);
  bool saw_annihilation = false;
  for (const Event& e : t.events) saw_annihilation |= std::holds_alternative<Annihilation>(e.kind);
  CHECK(saw_annihilation);
  CHECK(!t.terminated_by_event());
  // the surviving pair moved apart after the annihilation
  const auto& last = t.positions.back();
  CHECK(!std::isfinite(last[0].x));
  CHECK(!std::isfinite(last[1].x));
  CHECK(last[3].x - last[2].x > 2.0);
}

TEST_CASE("invalid initial data is rejected") {
  CHECK_THROWS_AS(integrate(Domain::unit_disk(), {{{1.2, 0.0}}, {1}}, 1.0), Error);
  CHECK_THROWS_AS(integrate(Domain::unit_disk(), {{{0.5, 0.0}}, {1}}, -1.0), Error);
}

TEST_CASE("a start already below the hit threshold certifies immediately") {
  IntegrateOptions opt;
  opt.boundary_hit_radius = 0.2;
  const Trajectory t = integrate(Domain::unit_disk(), {{{0.9, 0.0}}, {1}}, 1.0, opt);
  REQUIRE(t.terminated_by_event());
  const Event& e = t.events.back();
  REQUIRE(std::holds_alternative<BoundaryHit>(e.kind));
  // the whole measured time is the near-field extrapolation 2 pi d^2
  CHECK(e.time == doctest::Approx(kTwoPi * 0.01).epsilon(1e-12));
  CHECK(e.time_uncertainty >= kTwoPi * 1e-3 * 0.999);
}

TEST_CASE("incidence angle is zero for radial and vertical approaches") {
  const Trajectory td = integrate(Domain::unit_disk(), {{{0.7, 0.0}}, {1}}, 5.0);
  REQUIRE(td.terminated_by_event());
  CHECK(incidence_angle_deg(Domain::unit_disk(), td, td.events.size() - 1) <= 1e-6);

  const Trajectory th = integrate(Domain::half_plane(), {{{3.0, 0.2}}, {1}}, 5.0);
  REQUIRE(th.terminated_by_event());
  CHECK(incidence_angle_deg(Domain::half_plane(), th, th.events.size() - 1) <= 1e-6);
}

TEST_CASE("incidence angle needs enough terminal samples") {
  Trajectory sparse = integrate(Domain::unit_disk(), {{{0.7, 0.0}}, {1}}, 5.0);
  REQUIRE(sparse.terminated_by_event());
  // strip the window samples
  Trajectory chopped = sparse;
  std::size_t keep = 0;
  for (std::size_t k = 0; k < sparse.times.size(); ++k)
    if (Domain::unit_disk().boundary_distance(sparse.positions[k][0]) >= 0.25) keep = k;
  chopped.times.resize(keep + 1);
  chopped.positions.resize(keep + 1);
  chopped.velocities.resize(keep + 1);
  CHECK_THROWS_AS(incidence_angle_deg(Domain::unit_disk(), chopped, chopped.events.size() - 1),
                  Error);
}

TEST_CASE("not-in-regime configurations are rejected by the checkers") {
  GreensEvaluator disk(Domain::unit_disk());
  DislocationSystem deep{{{0.2, 0.0}}, {1}};
  CHECK_THROWS_AS(predict_theorem2(disk, deep, 0.1, 0.5), Error);
  DislocationSystem far_pair{{{0.3, 0.0}, {-0.3, 0.0}}, {+1, -1}};
  CHECK_THROWS_AS(predict_theorem3(disk, far_pair, 0.1, 0.4), Error);
}
