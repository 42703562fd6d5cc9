#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "disloc/energy.hpp"

namespace disloc {

enum class CollisionPolicy { Stop, Annihilate };

struct IntegrateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double event_time_tolerance = 1e-8;
  // hit thresholds; 0 selects the defaults (1e-4 * rho_bar for the boundary,
  // 1e-4 * diameter for pairs, falling back to the initial scales on
  // unbounded domains; parametric domains are clamped to the solver's
  // resolvable distance)
  double boundary_hit_radius = 0.0;
  double pair_hit_radius = 0.0;
  double min_step = 1e-14;
  std::uint64_t max_steps = 2'000'000;
  CollisionPolicy on_collision = CollisionPolicy::Stop;
  bool record_energy = true;  // forced off on parametric domains unless overridden
  double initial_step = 1e-4;
};

struct BoundaryHit {
  int index = 0;
  BoundaryPoint where;
};
struct DipoleCollision {
  int i = 0, j = 0;
  Vec2 location;
};
struct Annihilation {
  int i = 0, j = 0;
};

struct Event {
  std::variant<BoundaryHit, DipoleCollision, Annihilation> kind;
  double time = 0.0;
  double time_uncertainty = 0.0;
  bool terminal = true;
};

struct Trajectory {
  std::vector<double> times;
  // positions[k][i], velocities[k][i]; inactive slots hold NaN after annihilation
  std::vector<std::vector<Vec2>> positions;
  std::vector<std::vector<Vec2>> velocities;
  std::vector<double> energies;  // empty when energy recording is off
  std::vector<int> burgers;
  std::vector<Event> events;
  double boundary_hit_radius = 0.0;
  double pair_hit_radius = 0.0;
  std::uint64_t accepted_steps = 0;
  std::uint64_t rejected_steps = 0;
  std::uint64_t force_evaluations = 0;

  bool terminated_by_event() const {
    return !events.empty() && events.back().terminal;
  }
};

Trajectory integrate(const GreensEvaluator& kernels, const DislocationSystem& initial,
                     double t_max, const IntegrateOptions& options = {});
Trajectory integrate(const Domain& domain, const DislocationSystem& initial, double t_max,
                     const IntegrateOptions& options = {});

struct BoundPrediction {
  enum class Kind { Theorem2, Theorem3 } kind = Kind::Theorem2;
  double predicted_upper = 0.0;
  double measured = 0.0;
  double measured_uncertainty = 0.0;
  bool satisfied_leading_order = false;
  double cubic_fit = 0.0;  // fitted next-order coefficient (Theorem2 sweep)
  bool event_kind_matches = false;
};

// collision-with-the-boundary bound: T <= 2 pi delta0^2 + O(delta0^3)
BoundPrediction predict_theorem2(const GreensEvaluator& kernels, const DislocationSystem& initial,
                                 double delta0, double gamma0,
                                 const IntegrateOptions& options = {});

// dipole collision bound: T <= pi zeta0^2 eta0^2 / (2 (eta0^2 - zeta0^2 - 2(n-2) zeta0 delta0)).
// delta0 enters only for n > 2 and is an explicit caller input (the statement
// leaves it undefined); eta0 = +inf selects the pi zeta0^2 / 2 reduction.
BoundPrediction predict_theorem3(const GreensEvaluator& kernels, const DislocationSystem& initial,
                                 double zeta0, double eta0, double delta0 = 0.0,
                                 const IntegrateOptions& options = {});

// angle (degrees) between the terminal approach direction and the outward
// normal at the hit point; 0 means a perpendicular hit. Fitted from the
// trajectory samples with d_1 < rho_bar / 4 (at least 5 required).
double incidence_angle_deg(const Domain& domain, const Trajectory& traj,
                           std::size_t event_index);

}  // namespace disloc
