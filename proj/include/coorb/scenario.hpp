#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "coorb/coorbital.hpp"
#include "coorb/integrator.hpp"

namespace coorb {

// Artifact selectors for run_scenario. Trajectory and series go to CSV (or
// JSON with format=json); portrait, classification and frequencies are JSON.
enum class OutputKind {
    trajectory,
    resonant_series,
    swaps,
    portrait,
    classification,
    frequencies,
};

const char* output_kind_name(OutputKind kind);
OutputKind output_kind_from_name(const std::string& name);  // throws invalid_input

// One body in physical units: km, km/s, km^3/s^2.
struct BodySpec {
    double gm_km3s2 = 0.0;
    double radius_km = 0.0;
    double x_km = 0.0;
    double y_km = 0.0;
    double vx_kms = 0.0;
    double vy_kms = 0.0;
};

bool operator==(const BodySpec& a, const BodySpec& b);

// Parsed scenario in physical units; canonical units are internal to the run.
// Index 0 is the central body, 1 and 2 the co-orbital moons.
struct ScenarioConfig {
    std::string preset;  // name of the preset the config was expanded from, if any
    std::array<BodySpec, 3> bodies;

    Scheme scheme = Scheme::verlet2;
    double step_s = 0.0;               // 0 = auto: reference orbital period / 2000
    std::int64_t output_stride = 0;    // 0 = auto: aim for ~20000 recorded samples
    std::int64_t max_steps = std::numeric_limits<std::int64_t>::max();

    double duration_s = 0.0;           // required for any output that integrates
    std::vector<OutputKind> outputs;   // empty = trajectory only

    double ref_radius_km = 0.0;        // 0 = auto: |moon1 - central| at t = 0
    std::uint64_t seed = 0;
    double perturb_kms = 0.0;          // sigma of a seeded Gaussian kick on moon velocities
    double zeta_min_deg = 10.0;        // horseshoe/circulation cutoff angle
    double swap_window_s = 0.0;        // delta_a smoothing window; 0 = auto: 2 orbital periods

    // Portrait grid, kept in config units (degrees) so serialize/parse round
    // trips exactly; converted to a PortraitSpec (radians) at run time.
    double portrait_zeta_lo_deg = 2.0;
    double portrait_zeta_hi_deg = 358.0;
    int portrait_n_zeta = 481;
    double portrait_u_lo = -6.0;
    double portrait_u_hi = 6.0;
    int portrait_n_u = 241;
    double portrait_mu = 0.0;          // 0 = auto: (gm1 + gm2) / total

    std::string format = "csv";        // csv | json, for trajectory/series/swaps
    int threads = 1;
};

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

// Where preset files are looked up, in order of precedence: the explicit
// argument, the COORB_PRESET_DIR environment variable, the build-time presets
// path, then ./presets.
std::string preset_directory(const std::string& explicit_dir = "");

// Parse a flat sectioned key = value document (# and ; comments). A
// "preset = name" entry under [scenario] loads <preset_dir>/<name>.cfg as the
// base document; every explicit entry then overrides the preset field-wise.
// Unknown sections or keys are rejected with their line number.
ScenarioConfig parse_config(const std::string& text, const std::string& preset_dir = "");

// Inverse of parse_config: emits every field explicitly, so re-parsing yields
// an equal config whether or not the preset file is still around.
std::string serialize_config(const ScenarioConfig& cfg);

// Outcome of a scenario run. exit_code follows the CLI convention:
// 0 success, 3 collision abort, 4 numerical failure (config problems are
// reported as exceptions before a run starts). files lists everything
// written, manifest.json included; the manifest is always written, names
// every file with an FNV-1a64 content checksum, and flags partial output.
struct RunOutcome {
    int exit_code = 0;
    StopReason stop = StopReason::completed;
    std::vector<std::string> files;
};

RunOutcome run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

// Equilibrium survey for the config's masses at the reference separation:
// all five libration point configurations, the Gascheau margin, and growth
// rates, written to equilibria.json (plus the manifest).
RunOutcome run_equilibria(const ScenarioConfig& cfg, const std::string& out_dir);

}  // namespace coorb
