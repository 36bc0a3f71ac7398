#pragma once

#include <Eigen/Core>

#include <array>
#include <utility>

#include "coorb/errors.hpp"

namespace coorb {

using Vec2 = Eigen::Vector2d;

// One point mass in the plane. Units are whatever the enclosing SystemState
// uses (physical km/s at the I/O boundary, canonical internally).
struct BodyState {
    Vec2 position = Vec2::Zero();  // length
    Vec2 velocity = Vec2::Zero();  // length / time
    double gm = 0.0;               // G*m, length^3 / time^2
    double radius_phys = 0.0;      // body radius for collision checks; 0 = point mass
};

// Planar three-body snapshot. Bodies are ordered (central, moon1, moon2) with
// moon1 the more massive moon; this fixes the sign of the resonant angle.
struct SystemState {
    double t = 0.0;
    std::array<BodyState, 3> bodies{};

    const BodyState& central() const { return bodies[0]; }
    const BodyState& moon1() const { return bodies[1]; }
    const BodyState& moon2() const { return bodies[2]; }
    BodyState& central() { return bodies[0]; }
    BodyState& moon1() { return bodies[1]; }
    BodyState& moon2() { return bodies[2]; }
};

// Scale factors mapping canonical units back to physical ones. Canonical
// convention: central gm = 1 and the reference orbit radius = 1, so the
// canonical time unit is sqrt(ref_radius^3 / gm_central) and a circular
// reference orbit takes 2*pi.
struct UnitSystem {
    double length_unit = 1.0;  // physical length per canonical length
    double time_unit = 1.0;    // physical time per canonical time
    double gm_unit = 1.0;      // = length_unit^3 / time_unit^2

    double velocity_unit() const { return length_unit / time_unit; }
};

double total_gm(const SystemState& s);
Vec2 barycenter(const SystemState& s);
Vec2 barycenter_velocity(const SystemState& s);

// Throws invalid_input on non-finite coordinates, negative gm/radius,
// or coincident bodies.
void check_valid(const SystemState& s);

// Shift to the barycentric rest frame (barycenter pinned at the origin,
// total momentum zero). Pure translation; units are untouched.
SystemState recenter(const SystemState& s);

// Rescale so the central body's gm becomes 1 and ref_radius maps to 1.
// Pure scaling (no recentering), so physical -> canonical -> physical is an
// exact round trip; pair with recenter() to reach full canonical form.
std::pair<SystemState, UnitSystem> normalize(const SystemState& system, double ref_radius);

// Undo normalize(): map a canonical-unit state back to physical units.
SystemState to_physical(const SystemState& canonical, const UnitSystem& units);

// 2*pi*sqrt(a^3 / gm_total), Kepler's third law.
double kepler_period(double a, double gm_total);

// Time for the relative longitude of two nearly co-orbital bodies with
// semi-major-axis offset delta_a to drift through a full turn:
// kepler_period(a, gm_total) / ((3/2) |delta_a| / a)  (linearized Kepler drift).
double synodic_catchup_time(double a, double delta_a, double gm_total);

}  // namespace coorb
