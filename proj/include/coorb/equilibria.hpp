#pragma once

#include <array>
#include <utility>

#include "coorb/core.hpp"

namespace coorb {

// Euler kinds are labeled by where moon2 sits on the line:
//   euler_L1  between the central body and moon1,
//   euler_L2  outside moon1,
//   euler_L3  on the far side of the central body.
enum class EquilibriumKind { euler_L1, euler_L2, euler_L3, lagrange_L4, lagrange_L5 };

// A relative equilibrium: the configuration rotates rigidly at angular_rate
// about the barycenter, so in the co-rotating frame every body is at rest.
struct EquilibriumConfig {
    EquilibriumKind kind{};
    std::array<double, 3> masses{};    // gm of (central, moon1, moon2)
    double separation = 0.0;           // triangle side (Lagrange) / outer span (Euler)
    double angular_rate = 0.0;
    std::array<Vec2, 3> positions{};   // barycentric snapshot, co-rotating orientation
};

// Euler's quintic in rho = gap(B,C)/gap(A,B) for collinear masses (A,B,C)
// read left to right. Exposed so tests can scan for roots independently.
double euler_quintic(const std::array<double, 3>& masses_ltr, double rho);

// Collinear relative equilibrium for the left-to-right body arrangement given
// by `order` (a permutation of {0,1,2} naming SystemState body indices).
// Solves the quintic by bracketed bisection + Newton polish; the positive root
// is unique for any admissible masses. `separation` is the outer-body span.
EquilibriumConfig euler_collinear(const std::array<double, 3>& masses,
                                  const std::array<int, 3>& order, double separation = 1.0);

// Equilateral relative equilibrium rotating at omega = sqrt(G(m1+m2+m3)/d^3).
// L4 puts moon2 60 degrees ahead of moon1 (counterclockwise), L5 60 behind.
EquilibriumConfig lagrange_equilateral(const std::array<double, 3>& masses, double separation,
                                       EquilibriumKind sense);

// Initial conditions for the integrator: barycentric inertial state with
// velocities omega x r (counterclockwise), t = 0.
SystemState equilibrium_state(const EquilibriumConfig& cfg);

// Max over bodies of |a_grav + omega^2 r| at the configuration; the defining
// property of a relative equilibrium is that this vanishes.
double rotating_residual(const EquilibriumConfig& cfg);

// Gascheau/Routh criterion for the equilateral configuration:
// margin = 27(m1 m2 + m1 m3 + m2 m3)/(m1+m2+m3)^2, stable iff margin < 1.
std::pair<bool, double> gascheau_stable(const std::array<double, 3>& masses);

// Largest real part among the eigenvalues of the co-rotating-frame dynamics
// linearized at the configuration (closed-form gravity gradient + dense
// eigensolve). Positive means exponential instability at that rate.
double max_growth_rate(const EquilibriumConfig& cfg);

// max_growth_rate restricted to Euler kinds (collinear equilibria are
// unstable for every mass choice, so this is strictly positive).
double euler_unstable_check(const EquilibriumConfig& cfg);

}  // namespace coorb
