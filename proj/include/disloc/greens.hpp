#pragma once

#include <memory>

#include "disloc/geometry.hpp"
#include "disloc/harmonic.hpp"

namespace disloc {

enum class KernelSource { AnalyticImage, NumericSolve };
enum class KernelMethod { Auto, Analytic, Numeric };

struct KernelEvaluation {
  double value = 0.0;
  Vec2 gradient_x{0.0, 0.0};
  KernelSource source = KernelSource::AnalyticImage;
  double error_estimate = 0.0;  // 0 for analytic evaluations
};

struct GreensOptions {
  KernelMethod method = KernelMethod::Auto;
  int nystrom_points = 1024;
  ExecutionPolicy assembly_policy = ExecutionPolicy::Parallel;
  bool cache_densities = true;
  std::size_t cache_capacity = 8192;
};

// Per-domain kernel evaluator. Disk, half plane and plane use the method of
// images; parametric domains go through the boundary-integral solver, whose
// factorization and per-source densities are cached here. Evaluations are
// const and safe to call concurrently.
class GreensEvaluator {
 public:
  explicit GreensEvaluator(Domain domain, GreensOptions options = {});
  ~GreensEvaluator();
  GreensEvaluator(const GreensEvaluator&) = delete;
  GreensEvaluator& operator=(const GreensEvaluator&) = delete;

  const Domain& domain() const;
  bool analytic() const;

  // regular part k_Omega(x, y); finite on the diagonal
  KernelEvaluation k(Vec2 x, Vec2 y) const;
  // h_Omega(x) = k_Omega(x, x) and its gradient
  KernelEvaluation h(Vec2 x) const;
  // full Green's function; throws CoincidentPoints at x == y
  KernelEvaluation green(Vec2 x, Vec2 y) const;

  void clear_cache() const;
  // underlying boundary-integral context (numeric domains only; tests/bench)
  const NystromDirichlet* nystrom() const;

  struct ImplData;

 private:
  std::unique_ptr<ImplData> data_;
};

// convenience single-shot wrappers (construct an evaluator per call; fine for
// analytic domains, wasteful for parametric ones)
KernelEvaluation k_omega(const Domain& domain, Vec2 x, Vec2 y);
KernelEvaluation h_omega(const Domain& domain, Vec2 x);
KernelEvaluation green(const Domain& domain, Vec2 x, Vec2 y);

}  // namespace disloc
