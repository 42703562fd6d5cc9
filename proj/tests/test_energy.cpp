#include <doctest.h>

#include <cmath>
#include <numbers>

#include "disloc/energy.hpp"
#include "disloc/rng.hpp"

using namespace disloc;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;

Vec2 random_in_disk(Rng& rng, double rmax) {
  for (;;) {
    Vec2 p{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (p.norm() < rmax) return p;
  }
}
}  // namespace

TEST_CASE("renormalized energy closed forms") {
  // single dislocation on the disk: E = h/2
  CHECK(renormalized_energy(Domain::unit_disk(), {{{0.6, 0.0}}, {1}}) ==
        doctest::Approx(std::log(0.64) / kFourPi).epsilon(1e-12));
  CHECK(std::abs(renormalized_energy(Domain::unit_disk(), {{{0.0, 0.0}}, {1}})) <= 1e-15);

  // plane dipole: E = b1 b2 (-(1/2pi) log s)
  const double s0 = 0.1;
  CHECK(renormalized_energy(Domain::full_plane(),
                            {{{0.05, 0.0}, {-0.05, 0.0}}, {+1, -1}}) ==
        doctest::Approx(std::log(s0) / kTwoPi).epsilon(1e-12));
}

TEST_CASE("energy is invariant under simultaneous permutations") {
  GreensEvaluator g(Domain::unit_disk());
  DislocationSystem sys{{{0.3, 0.1}, {-0.2, 0.4}, {0.1, -0.5}}, {+1, -1, +1}};
  DislocationSystem perm{{sys.z[2], sys.z[0], sys.z[1]}, {sys.b[2], sys.b[0], sys.b[1]}};
  CHECK(renormalized_energy(g, sys) == doctest::Approx(renormalized_energy(g, perm)).epsilon(1e-14));
}

TEST_CASE("invalid systems are rejected") {
  const Domain disk = Domain::unit_disk();
  CHECK_THROWS_AS(renormalized_energy(disk, {{}, {}}), Error);
  CHECK_THROWS_AS(renormalized_energy(disk, {{{0.2, 0.0}, {0.2, 0.0}}, {1, -1}}), Error);
  CHECK_THROWS_AS(renormalized_energy(disk, {{{1.2, 0.0}}, {1}}), Error);
}

TEST_CASE("Peach-Koehler force closed forms") {
  // disk single: f = -h'/2 points outward
  const auto rep = peach_koehler(Domain::unit_disk(), {{{0.6, 0.0}}, {1}});
  CHECK(rep.f[0].x == doctest::Approx(0.6 / (kTwoPi * 0.64)).epsilon(1e-12));
  CHECK(std::abs(rep.f[0].y) <= 1e-15);
  CHECK(rep.f[0].x > 0.0);

  // critical point at the center
  CHECK(peach_koehler(Domain::unit_disk(), {{{0.0, 0.0}}, {1}}).f[0].norm() <= 1e-15);

  // half plane single at height d: f = (0, -1/(4 pi d)), the normal leading
  // term exactly, so the residual vanishes
  const double d = 0.37;
  const auto reph = peach_koehler(Domain::half_plane(), {{{0.0, d}}, {1}}, 0);
  CHECK(reph.f[0].x == doctest::Approx(0.0));
  CHECK(reph.f[0].y == doctest::Approx(-1.0 / (kFourPi * d)).epsilon(1e-13));
  REQUIRE(reph.leading_term.has_value());
  CHECK((reph.f[0] - *reph.leading_term).norm() <= 1e-14);
  CHECK(reph.residual->norm() <= 1e-14);
}

TEST_CASE("plane dipole forces are attracting and antisymmetric") {
  GreensEvaluator g(Domain::full_plane());
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    const Vec2 z1{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Vec2 z2{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (dist(z1, z2) < 0.05) continue;
    const auto rep = peach_koehler(g, {{z1, z2}, {+1, -1}});
    CHECK((rep.f[0] + rep.f[1]).norm() <= 1e-13);          // action-reaction
    CHECK(rep.f[0].dot(z2 - z1) > 0.0);                    // attraction
    const double mag = 1.0 / (kTwoPi * dist(z1, z2));
    CHECK(rep.f[0].norm() == doctest::Approx(mag).epsilon(1e-12));
  }
}

TEST_CASE("forces match central finite differences of the energy") {
  Rng rng(13);
  SUBCASE("unit disk") {
    GreensEvaluator g(Domain::unit_disk());
    for (int trial = 0; trial < 100; ++trial) {
      DislocationSystem sys;
      sys.z = {random_in_disk(rng, 0.85), random_in_disk(rng, 0.85)};
      if (dist(sys.z[0], sys.z[1]) < 0.1) continue;
      sys.b = {+1, rng.uniform01() < 0.5 ? -1 : +1};
      const auto pk = peach_koehler(g, sys);
      const auto fd = finite_difference_gradient(g, sys, 1e-5);
      for (int i = 0; i < 2; ++i)
        CHECK((pk.f[i] - fd[i]).norm() <= 1e-6 * std::max(1.0, pk.f[i].norm()));
    }
  }
  SUBCASE("half plane") {
    GreensEvaluator g(Domain::half_plane());
    for (int trial = 0; trial < 100; ++trial) {
      DislocationSystem sys;
      sys.z = {{rng.uniform(-1, 1), rng.uniform(0.2, 1.5)},
               {rng.uniform(-1, 1), rng.uniform(0.2, 1.5)}};
      if (dist(sys.z[0], sys.z[1]) < 0.1) continue;
      sys.b = {+1, -1};
      const auto pk = peach_koehler(g, sys);
      const auto fd = finite_difference_gradient(g, sys, 1e-5);
      for (int i = 0; i < 2; ++i)
        CHECK((pk.f[i] - fd[i]).norm() <= 1e-6 * std::max(1.0, pk.f[i].norm()));
    }
  }
  SUBCASE("full plane") {
    GreensEvaluator g(Domain::full_plane());
    for (int trial = 0; trial < 100; ++trial) {
      DislocationSystem sys;
      sys.z = {{rng.uniform(-1, 1), rng.uniform(-1, 1)}, {rng.uniform(-1, 1), rng.uniform(-1, 1)},
               {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
      if (d_n(Domain::full_plane(), sys.z) < 0.1) continue;
      sys.b = {+1, -1, +1};
      const auto pk = peach_koehler(g, sys);
      const auto fd = finite_difference_gradient(g, sys, 1e-5);
      for (int i = 0; i < 3; ++i)
        CHECK((pk.f[i] - fd[i]).norm() <= 1e-6 * std::max(1.0, pk.f[i].norm()));
    }
  }
}

TEST_CASE("finite differences recover the critical point") {
  const auto fd = finite_difference_gradient(Domain::unit_disk(), {{{0.0, 0.0}}, {1}}, 1e-5);
  CHECK(fd[0].norm() <= 1e-8);
}

TEST_CASE("too-large steps are rejected") {
  CHECK_THROWS_AS(finite_difference_gradient(Domain::unit_disk(), {{{0.99, 0.0}}, {1}}, 0.05),
                  Error);
  CHECK_THROWS_AS(
      finite_difference_gradient(Domain::full_plane(), {{{0.0, 0.0}, {1e-5, 0.0}}, {1, -1}}, 1e-4),
      Error);
}

TEST_CASE("near-boundary decomposition: leading term doubles while the residual stays bounded") {
  GreensEvaluator g(Domain::unit_disk());
  double residuals[4];
  double leadings[4];
  int idx = 0;
  for (double delta : {0.1, 0.05, 0.025, 0.0125}) {
    DislocationSystem sys{{{1.0 - delta, 0.0}, {0.0, 0.0}}, {+1, -1}};
    const auto rep = peach_koehler(g, sys, 0);
    REQUIRE(rep.leading_term.has_value());
    leadings[idx] = rep.leading_term->norm();
    residuals[idx] = rep.residual->norm();
    ++idx;
  }
  for (int i = 0; i + 1 < 4; ++i)
    CHECK(leadings[i + 1] == doctest::Approx(2.0 * leadings[i]).epsilon(1e-12));
  double rmin = residuals[0], rmax = residuals[0];
  for (double r : residuals) {
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  CHECK(rmax <= 2.0 * rmin);  // bounded, no 1/d blow-up in the residual
  CHECK(rmax <= 1.0 / (kTwoPi * 0.5));
}

TEST_CASE("forces on the ellipse match finite differences through the numeric kernels") {
  GreensEvaluator g(Domain::parametric(FourierCurve::ellipse(2.0, 1.0)));
  Rng rng(3);
  int done = 0;
  while (done < 10) {
    DislocationSystem sys;
    sys.z = {{rng.uniform(-1.6, 1.6), rng.uniform(-0.8, 0.8)},
             {rng.uniform(-1.6, 1.6), rng.uniform(-0.8, 0.8)}};
    sys.b = {+1, -1};
    bool ok = dist(sys.z[0], sys.z[1]) > 0.15;
    for (const Vec2 p : sys.z)
      ok = ok && g.domain().contains(p) && g.domain().boundary_distance(p) > 0.12;
    if (!ok) continue;
    const auto pk = peach_koehler(g, sys);
    const auto fd = finite_difference_gradient(g, sys, 1e-5);
    for (int i = 0; i < 2; ++i)
      CHECK((pk.f[i] - fd[i]).norm() <= 1e-6 * std::max(1.0, pk.f[i].norm()));
    ++done;
  }
}
