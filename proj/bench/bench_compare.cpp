// Timing comparison of the OpenMP kernels against their serial reference
// implementations: boundary-matrix assembly, trajectory ensembles, and the
// confinement epsilon study.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "disloc/confinement.hpp"
#include "disloc/dynamics.hpp"
#include "disloc/harmonic.hpp"
#include "disloc/parallel.hpp"

using namespace disloc;

namespace {

double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

template <class F>
double timed(F&& f) {
  const double t0 = now_s();
  f();
  return now_s() - t0;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   results %s\n", name,
              serial_s, parallel_s, serial_s / parallel_s, identical ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
  std::printf("hardware threads: %d\n", hardware_threads());

  {
    const int n = quick ? 512 : 1536;
    const Domain dom = Domain::parametric(FourierCurve::smoothed_cardioid(0.32));
    const NystromDirichlet* a = nullptr;
    const NystromDirichlet* b = nullptr;
    const double ts = timed([&] { a = new NystromDirichlet(dom, n, ExecutionPolicy::Serial); });
    const double tp = timed([&] { b = new NystromDirichlet(dom, n, ExecutionPolicy::Parallel); });
    const bool same = std::memcmp(a->assembled_matrix().data(), b->assembled_matrix().data(),
                                  a->assembled_matrix().size() * sizeof(double)) == 0;
    report("nystrom assembly", ts, tp, same);
    delete a;
    delete b;
  }

  {
    const int runs = quick ? 64 : 400;
    const Domain disk = Domain::unit_disk();
    GreensEvaluator kernels(disk);
    const auto cfgs = sample_interior(disk, RegionD{2, 0.2, 0.5}, runs, 11);
    std::vector<double> times_serial(runs), times_parallel(runs);
    auto sweep = [&](ExecutionPolicy pol, std::vector<double>& out) {
      parallel_for(runs, pol, [&](std::int64_t i) {
        const Trajectory t = integrate(kernels, {cfgs[i], {+1, -1}}, 20.0);
        out[i] = t.events.back().time;
      });
    };
    const double ts = timed([&] { sweep(ExecutionPolicy::Serial, times_serial); });
    const double tp = timed([&] { sweep(ExecutionPolicy::Parallel, times_parallel); });
    const bool same = std::memcmp(times_serial.data(), times_parallel.data(),
                                  runs * sizeof(double)) == 0;
    report("trajectory ensemble", ts, tp, same);
  }

  {
    const Domain disk = Domain::unit_disk();
    const BoundaryDatum datum = BoundaryDatum::uniform(disk);
    std::vector<Vec2> probes;
    const int g = quick ? 3 : 5;
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        const Vec2 p{-0.6 + 1.2 * i / (g - 1), -0.6 + 1.2 * j / (g - 1)};
        probes.push_back(p);
      }
    const double eps_seq[] = {0.1, 0.05};
    std::vector<ConvergenceRow> ra, rb;
    const double ts =
        timed([&] { ra = epsilon_convergence_study(disk, datum, probes, eps_seq, {},
                                                   ExecutionPolicy::Serial); });
    const double tp =
        timed([&] { rb = epsilon_convergence_study(disk, datum, probes, eps_seq, {},
                                                   ExecutionPolicy::Parallel); });
    bool same = ra.size() == rb.size();
    for (std::size_t i = 0; same && i < ra.size(); ++i)
      same = std::memcmp(&ra[i].F_eps, &rb[i].F_eps, sizeof(double)) == 0;
    report("confinement eps study", ts, tp, same);
  }

  return 0;
}
