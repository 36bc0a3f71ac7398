#pragma once

#include <vector>

#include "coorb/coorbital.hpp"
#include "coorb/integrator.hpp"

namespace coorb {

struct OrbitalElements {
    double a = 0.0;          // osculating semi-major axis
    double e = 0.0;          // eccentricity
    double longitude = 0.0;  // polar angle of the position, radians in (-pi, pi]
};

// Instantaneous Keplerian fit: a from vis-viva, e from the eccentricity
// vector. `body` must be given relative to the attracting center. Throws
// numerical_error for parabolic/hyperbolic states.
OrbitalElements osculating_elements(const BodyState& body, double gm_central);

// Elements of moon 1 or 2 about the central body, with the two-body
// gm_central + gm_moon as the effective attraction.
OrbitalElements osculating_elements(const SystemState& state, int moon_index);

// Time series of the resonance variables. zeta is the angle at the central
// body from moon1 to moon2 (counterclockwise), unwrapped to a continuous
// series; per-sample values before unwrapping lie in (0, 360) degrees.
struct ResonantSeries {
    std::vector<double> t;
    std::vector<double> zeta;     // unwrapped, radians
    std::vector<double> delta_a;  // a_moon2 - a_moon1; NaN flags an unbound sample
    std::vector<double> r_rel;    // moon-moon distance
};

ResonantSeries resonant_series(const TrajectoryRecord& traj);

struct SwapEvent {
    // Direction describes moon2's transition: inner_to_outer means
    // delta_a = a_moon2 - a_moon1 changed sign from negative to positive.
    enum class Direction { inner_to_outer, outer_to_inner };
    double t_swap = 0.0;
    double min_distance = 0.0;
    Direction direction = Direction::inner_to_outer;
};

// Sign changes of the window-averaged delta_a (the raw osculating series
// wiggles every orbit; averaging over about one orbital period removes that),
// each annotated with the local minimum of the moon-moon distance.
std::vector<SwapEvent> detect_swaps(const ResonantSeries& series, double smoothing_window);

// Decide tadpole / horseshoe / circulating from the unwrapped zeta series;
// undetermined when the series does not yet cover a full libration.
Regime classify_trajectory(const ResonantSeries& series);

// View the trajectory in a frame rotating at omega about the origin (the
// barycenter, for canonical states): positions rotate by -omega*t and
// velocities get the usual -omega x r correction. Conservation figures are
// copied from the inertial record unchanged.
TrajectoryRecord rotating_frame(const TrajectoryRecord& traj, double omega);

struct Tone {
    double frequency = 0.0;  // angular frequency, rad per time unit
    double amplitude = 0.0;
};

// Dominant frequency of a uniformly sampled real series: Hann-windowed FFT
// peak refined by golden-section search on the windowed least-squares
// projection power onto {cos(w t), sin(w t)}. Resolves far below one FFT bin
// (synthetic single tones recover to ~1e-10 relative). Needs >= 64 samples;
// a constant series reports frequency 0 with amplitude = mean.
Tone naff_frequency(const std::vector<double>& signal, double dt);

// Frequency-drift chaos indicator: the libration frequency of zeta measured
// on the two halves of the series, returned as |nu1 - nu2| / mean(nu).
// Small values mean regular (quasi-periodic) motion.
double quasiperiodicity_index(const ResonantSeries& series);

}  // namespace coorb
