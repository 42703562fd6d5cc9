#include <doctest.h>

#include <cmath>
#include <numbers>

#include "disloc/greens.hpp"
#include "disloc/rng.hpp"

using namespace disloc;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec2 random_in_disk(Rng& rng, double rmax) {
  for (;;) {
    Vec2 p{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (p.norm() < rmax) return p;
  }
}

// fourth-order central Laplacian
double fd_laplacian(const GreensEvaluator& g, Vec2 x, double h) {
  auto f = [&](double dx, double dy) { return g.h({x.x + dx, x.y + dy}).value; };
  const double lx = (-f(2 * h, 0) + 16 * f(h, 0) - 30 * f(0, 0) + 16 * f(-h, 0) - f(-2 * h, 0)) /
                    (12 * h * h);
  const double ly = (-f(0, 2 * h) + 16 * f(0, h) - 30 * f(0, 0) + 16 * f(0, -h) - f(0, -2 * h)) /
                    (12 * h * h);
  return lx + ly;
}
}  // namespace

TEST_CASE("disk image kernel: k vanishes when the source sits at the center") {
  GreensEvaluator g(Domain::unit_disk());
  // exact at y = 0 and in the limit from nearby sources
  CHECK(std::abs(g.k({0.5, 0.0}, {0.0, 0.0}).value) <= 1e-14);
  CHECK(std::abs(g.k({0.5, 0.0}, {1e-6, 0.0}).value) <= 1e-6);
  CHECK(g.k({0.5, 0.0}, {0.0, 0.0}).gradient_x.norm() <= 1e-14);
}

TEST_CASE("half plane kernel values come from the reflected source") {
  GreensEvaluator g(Domain::half_plane());
  CHECK(g.k({0.0, 1.0}, {0.0, 2.0}).value ==
        doctest::Approx(std::log(3.0) / kTwoPi).epsilon(1e-14));
  CHECK(g.green({0.0, 1.0}, {0.0, 3.0}).value ==
        doctest::Approx(std::log(2.0) / kTwoPi).epsilon(1e-14));
}

TEST_CASE("full plane uses the free-space convention") {
  GreensEvaluator g(Domain::full_plane());
  CHECK(g.k({3.0, 1.0}, {-2.0, 0.5}).value == 0.0);
  CHECK(g.h({1e6, -4.0}).value == 0.0);
  const Vec2 x{0.0, 0.0}, y{1.0, 0.0};
  CHECK(g.green(x, y).value == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("h on the disk matches (1/2pi) log(1 - |x|^2)") {
  GreensEvaluator g(Domain::unit_disk());
  const auto h0 = g.h({0.0, 0.0});
  CHECK(std::abs(h0.value) <= 1e-15);
  CHECK(h0.gradient_x.norm() <= 1e-15);

  const auto h6 = g.h({0.6, 0.0});
  CHECK(h6.value == doctest::Approx(std::log(0.64) / kTwoPi).epsilon(1e-14));
  CHECK(h6.gradient_x.x == doctest::Approx(-0.6 / (kPi * 0.64)).epsilon(1e-14));
  CHECK(std::abs(h6.gradient_x.y) <= 1e-15);
}

TEST_CASE("h on the half plane matches (1/2pi) log(2 x2)") {
  GreensEvaluator g(Domain::half_plane());
  const auto h = g.h({7.0, 0.5});
  CHECK(std::abs(h.value) <= 1e-15);
  CHECK(h.gradient_x.x == doctest::Approx(0.0));
  CHECK(h.gradient_x.y == doctest::Approx(1.0 / kPi).epsilon(1e-14));
}

TEST_CASE("G vanishes toward the boundary and is symmetric") {
  GreensEvaluator g(Domain::unit_disk());
  // near-boundary probe: the closed form gives ~1.34e-3 here
  const auto near = g.green({0.99, 0.0}, {0.0, 0.3});
  CHECK(std::abs(near.value) <= 5e-3);

  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const Vec2 x = random_in_disk(rng, 0.95), y = random_in_disk(rng, 0.95);
    if (dist(x, y) < 1e-3) continue;
    CHECK(g.green(x, y).value == doctest::Approx(g.green(y, x).value).epsilon(1e-13));
    CHECK(g.k(x, y).value == doctest::Approx(g.k(y, x).value).epsilon(1e-13));
  }
  CHECK_THROWS_AS(g.green({0.2, 0.2}, {0.2, 0.2}), Error);
}

TEST_CASE("points outside the domain are rejected") {
  GreensEvaluator g(Domain::unit_disk());
  CHECK_THROWS_AS(g.k({1.5, 0.0}, {0.0, 0.0}), Error);
  CHECK_THROWS_AS(g.h({0.0, -1.2}), Error);
}

TEST_CASE("h satisfies the Liouville equation on disk and half plane") {
  // -Lap h = (2/pi) exp(-4 pi h), checked with a 4th-order stencil
  for (const Domain& dom : {Domain::unit_disk(), Domain::half_plane()}) {
    GreensEvaluator g(dom);
    Rng rng(31);
    int tested = 0;
    while (tested < 100) {
      Vec2 x;
      if (dom.kind() == DomainKind::UnitDisk) {
        x = random_in_disk(rng, 0.9);
        if (1.0 - x.norm() < 0.1) continue;
      } else {
        x = {rng.uniform(-3, 3), rng.uniform(0.1, 2.0)};
      }
      const double d1 = dom.boundary_distance(x);
      const double h = d1 / 50.0;
      const double lhs = -fd_laplacian(g, x, h);
      const double rhs = (2.0 / kPi) * std::exp(-4.0 * kPi * g.h(x).value);
      CHECK(std::abs(lhs - rhs) <= 1e-6 * std::abs(rhs));
      ++tested;
    }
  }
}

TEST_CASE("numeric kernel on the disk cross-validates the image formulas") {
  GreensOptions opts;
  opts.method = KernelMethod::Numeric;
  GreensEvaluator numeric(Domain::unit_disk(), opts);
  GreensEvaluator exact(Domain::unit_disk());
  REQUIRE(!numeric.analytic());
  Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    const Vec2 x = random_in_disk(rng, 0.95), y = random_in_disk(rng, 0.95);
    const auto kn = numeric.k(x, y);
    const auto ka = exact.k(x, y);
    CHECK(std::abs(kn.value - ka.value) <= 1e-6);
    CHECK((kn.gradient_x - ka.gradient_x).norm() <= 1e-6);
    CHECK(kn.source == KernelSource::NumericSolve);
    CHECK(ka.error_estimate == 0.0);
  }
  const auto hn = numeric.h({0.6, 0.0});
  CHECK(hn.value == doctest::Approx(std::log(0.64) / kTwoPi).epsilon(1e-8));
  CHECK(hn.gradient_x.x == doctest::Approx(-0.6 / (kPi * 0.64)).epsilon(1e-7));
}

TEST_CASE("kernel gradients agree with central differences for both sources") {
  GreensOptions opts;
  opts.method = KernelMethod::Numeric;
  GreensEvaluator numeric(Domain::unit_disk(), opts);
  GreensEvaluator exact(Domain::unit_disk());
  const Vec2 x{0.4, 0.1}, y{-0.2, 0.3};
  const double s = 1e-6;
  for (const GreensEvaluator* g : {&exact, &numeric}) {
    const Vec2 grad = g->k(x, y).gradient_x;
    const Vec2 fd{(g->k({x.x + s, x.y}, y).value - g->k({x.x - s, x.y}, y).value) / (2 * s),
                  (g->k({x.x, x.y + s}, y).value - g->k({x.x, x.y - s}, y).value) / (2 * s)};
    CHECK((grad - fd).norm() <= 1e-6 * std::max(1.0, grad.norm()));
  }
}

TEST_CASE("parametric kernels are symmetric within their error estimates") {
  GreensEvaluator g(Domain::parametric(FourierCurve::ellipse(2.0, 1.0)));
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const Vec2 x{rng.uniform(-1.2, 1.2), rng.uniform(-0.6, 0.6)};
    const Vec2 y{rng.uniform(-1.2, 1.2), rng.uniform(-0.6, 0.6)};
    if (!g.domain().contains(x) || !g.domain().contains(y) || dist(x, y) < 0.05) continue;
    const auto kxy = g.k(x, y);
    const auto kyx = g.k(y, x);
    CHECK(std::abs(kxy.value - kyx.value) <=
          2.0 * (kxy.error_estimate + kyx.error_estimate) + 1e-10);
  }
}

TEST_CASE("single-shot wrappers match the evaluator") {
  const Domain disk = Domain::unit_disk();
  CHECK(k_omega(disk, {0.3, 0.1}, {0.0, 0.2}).value ==
        GreensEvaluator(disk).k({0.3, 0.1}, {0.0, 0.2}).value);
  CHECK(h_omega(disk, {0.25, -0.4}).value == GreensEvaluator(disk).h({0.25, -0.4}).value);
}
