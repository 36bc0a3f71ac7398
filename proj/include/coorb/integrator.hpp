#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "coorb/core.hpp"

namespace coorb {

enum class Scheme {
    verlet2,   // kick-drift-kick leapfrog, 2nd order
    yoshida4,  // triple-jump composition of verlet2, 4th order
};

// States fed to the integrator are expected in canonical units (central gm = 1,
// reference radius = 1); the zero-radius collision fallback below assumes that.
struct IntegratorConfig {
    Scheme scheme = Scheme::verlet2;
    double step = 1e-3;                // time step, same units as SystemState::t
    std::int64_t output_stride = 1;    // record every n-th step
    std::int64_t max_steps = std::numeric_limits<std::int64_t>::max();
    bool collision_check = true;
};

// Drifts are maxima over the recorded samples, relative to the initial value
// (barycenter_drift is absolute, in length units).
struct ConservationReport {
    double energy_rel_drift = 0.0;
    double ang_momentum_rel_drift = 0.0;
    double barycenter_drift = 0.0;
};

enum class StopReason { completed, collision, max_steps };

struct CollisionInfo {
    double t = 0.0;
    int body_a = -1;
    int body_b = -1;
    double distance = 0.0;
};

struct TrajectoryRecord {
    std::vector<SystemState> samples;
    ConservationReport conservation;
    StopReason stop = StopReason::completed;
    CollisionInfo collision{};  // meaningful only when stop == collision
};

// Newtonian pairwise attractions: a_i = sum_j gm_j (r_j - r_i)/|r_j - r_i|^3.
// Each pair's direction term is computed once and reused for both bodies, so
// the implied forces are antisymmetric to round-off.
std::array<Vec2, 3> accelerations(const SystemState& state);

// Energy and angular momentum per unit G (masses enter as gm); only relative
// drifts are meaningful, so the constant G factor is irrelevant.
double total_energy(const SystemState& state);
double total_angular_momentum(const SystemState& state);

// One step of the configured scheme. Throws collision_error if collision_check
// is on and two bodies end up closer than the sum of their radii
// (1e-6 canonical when both radii are zero).
SystemState step(const SystemState& state, const IntegratorConfig& cfg);

// Fixed-step propagation to t_end (the final step may overshoot t_end by less
// than one step; partial steps would break the symplectic structure). Always
// records the initial and final states, plus every output_stride-th step in
// between. A collision or the max_steps cap stops early with the partial
// record flagged rather than throwing.
TrajectoryRecord propagate(const SystemState& state, const IntegratorConfig& cfg, double t_end);

}  // namespace coorb
