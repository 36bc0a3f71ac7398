#pragma once

#include <string>
#include <vector>

#include "coorb/core.hpp"

namespace coorb {

// Motion classes of the 1:1 resonance. `undetermined` is only produced by
// trajectory classification when the series is too short to decide.
enum class Regime {
    tadpole_L4,
    tadpole_L5,
    horseshoe,
    circulating,
    separatrix,
    infeasible,
    undetermined,
};

const char* regime_name(Regime r);

// Energy levels of the averaged model E = u^2/2 - V(zeta):
// the libration centers at zeta = 60/300 deg and the separatrix through L3.
inline constexpr double kEnergyL4 = 0.5;  // -V(60 deg)
inline constexpr double kEnergyL3 = 1.5;  // -V(180 deg)

// The averaged model is singular at zeta = 0, so the boundary between
// horseshoe and circulating motion is represented by an energy cutoff
// E_L12 = -V(zeta_min): above it the guiding center would pass closer than
// zeta_min to the other moon and the averaging approximation breaks down.
struct ClassifyOptions {
    double zeta_min = 0.17453292519943295;  // 10 deg, in radians
    double separatrix_tol = 1e-9;           // |E - level| below this reads as separatrix
};

double energy_cutoff(const ClassifyOptions& opts);  // E_L12

// A point of the reduced phase space. zeta is the moon1-central-moon2 angle
// (radians); u = zetadot/(n sqrt(3 mu)) is the rescaled relative mean motion,
// sign-linked to the radius difference of the two moons.
struct CoorbitalPoint {
    double zeta = 0.0;
    double u = 0.0;
    double energy = 0.0;
    Regime regime = Regime::undetermined;
};

// V(zeta) = cos(zeta) - (2 - 2 cos(zeta))^(-1/2); -> -inf as zeta -> 0.
// Throws on zeta = 0 mod 2 pi (the collision direction).
double potential_v(double zeta);

// V'(zeta) = sin(zeta) [(2 - 2 cos zeta)^(-3/2) - 1]; zero exactly at
// 60, 180 and 300 degrees and nowhere else in (0, 360).
double potential_v_prime(double zeta);

double coorbital_energy(double zeta, double u);  // u^2/2 - V(zeta)

CoorbitalPoint coorbital_point(double zeta, double u, const ClassifyOptions& opts = {});

// Hamiltonian flow of E in the rescaled time tau = n sqrt(3 mu) t:
// dzeta/dtau = u, du/dtau = V'(zeta). The u-rescaling makes the flow itself
// mu-free; mu and n re-enter only when converting tau or u to physical units.
std::pair<double, double> reduced_flow(const CoorbitalPoint& point, double mu);

Regime classify_energy(double energy, double zeta, const ClassifyOptions& opts = {});

// Libration period by quadrature, T = 2 * integral dzeta / sqrt(2(E + V)),
// over the classically allowed zeta range, converted to physical time via
// 1/(n sqrt(3 mu)). Valid for any E above the L4/L5 minimum that is not on a
// separatrix (the E_L12 cutoff is a classification label, not a validity
// bound for the quadrature). Throws numerical_error at separatrix energies.
double libration_period(double energy, double mu, double n, const ClassifyOptions& opts = {});

// Linearized libration frequency about L4/L5 in physical time:
// n sqrt(27 mu / 4), from V''(60 deg) = -9/4.
double tadpole_frequency(double mu, double n);

// Linear map between u and the osculating semi-major-axis difference
// delta_a = a_moon2 - a_moon1:  delta_a = -(2/3) sqrt(3 mu) u a_ref.
double delta_a_from_u(double u, double mu, double a_ref);
double u_from_delta_a(double delta_a, double mu, double a_ref);

struct PortraitSpec {
    double zeta_lo = 0.03490658503988659;  // 2 deg: keep a guard band off the singularity
    double zeta_hi = 6.248278722105955;    // 358 deg
    int n_zeta = 481;
    double u_lo = -6.0;
    double u_hi = 6.0;
    int n_u = 241;
};

// Regime geography of the reduced model: grid of energies and labels plus the
// separatrix levels. Rows are u values, columns zeta values, row-major.
struct PhasePortrait {
    PortraitSpec spec;
    double mu = 0.0;
    double energy_l3 = kEnergyL3;
    double energy_l12 = 0.0;
    std::vector<CoorbitalPoint> grid;

    const CoorbitalPoint& at(int iu, int iz) const { return grid[iu * spec.n_zeta + iz]; }
    double zeta_value(int iz) const {
        return spec.zeta_lo + (spec.zeta_hi - spec.zeta_lo) * iz / (spec.n_zeta - 1);
    }
    double u_value(int iu) const {
        return spec.u_lo + (spec.u_hi - spec.u_lo) * iu / (spec.n_u - 1);
    }
};

// Fill the grid (cells are independent; `threads` > 1 splits rows, output is
// identical regardless of the thread count).
PhasePortrait phase_portrait(double mu, const PortraitSpec& spec, const ClassifyOptions& opts = {},
                             int threads = 1);

}  // namespace coorb
