#include "coorb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <unsupported/Eigen/FFT>

#include "coorb/errors.hpp"

namespace coorb {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_2pi(double angle) {
    double w = std::fmod(angle, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w;
}

// Wrap to (-pi, pi]; used for unwrapping increments.
double wrap_pm_pi(double angle) {
    double w = wrap_2pi(angle);
    return w > kPi ? w - 2.0 * kPi : w;
}

}  // namespace

OrbitalElements osculating_elements(const BodyState& body, double gm_central) {
    if (gm_central <= 0.0) throw invalid_input("osculating_elements: gm must be positive");
    const double r = body.position.norm();
    if (r <= 0.0) throw invalid_input("osculating_elements: body at the attracting center");
    const double v2 = body.velocity.squaredNorm();
    const double inv_a = 2.0 / r - v2 / gm_central;
    if (inv_a <= 0.0) {
        throw numerical_error("osculating_elements: state is not bound (parabolic or hyperbolic)");
    }
    OrbitalElements el;
    el.a = 1.0 / inv_a;
    // Eccentricity vector e = ((v^2 - gm/r) r - (r.v) v) / gm.
    const double rv = body.position.dot(body.velocity);
    const Vec2 evec = ((v2 - gm_central / r) * body.position - rv * body.velocity) / gm_central;
    el.e = evec.norm();
    el.longitude = std::atan2(body.position.y(), body.position.x());
    return el;
}

OrbitalElements osculating_elements(const SystemState& state, int moon_index) {
    if (moon_index != 1 && moon_index != 2) {
        throw invalid_input("osculating_elements: moon_index must be 1 or 2");
    }
    const BodyState& central = state.central();
    const BodyState& moon = state.bodies[static_cast<std::size_t>(moon_index)];
    BodyState rel = moon;
    rel.position = moon.position - central.position;
    rel.velocity = moon.velocity - central.velocity;
    return osculating_elements(rel, central.gm + moon.gm);
}

ResonantSeries resonant_series(const TrajectoryRecord& traj) {
    if (traj.samples.size() < 2) {
        throw invalid_input("resonant_series: need at least 2 trajectory samples");
    }
    ResonantSeries series;
    const std::size_t n = traj.samples.size();
    series.t.reserve(n);
    series.zeta.reserve(n);
    series.delta_a.reserve(n);
    series.r_rel.reserve(n);

    double prev_raw = 0.0;
    double unwrapped = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const SystemState& s = traj.samples[k];
        const Vec2 r1 = s.moon1().position - s.central().position;
        const Vec2 r2 = s.moon2().position - s.central().position;
        if (r1.norm() == 0.0 || r2.norm() == 0.0) {
            throw numerical_error("resonant_series: moon coincides with the central body");
        }
        // Angle from moon1 to moon2 as seen from the central body,
        // counterclockwise, in (0, 2pi) before unwrapping.
        const double cross = r1.x() * r2.y() - r1.y() * r2.x();
        const double dot = r1.dot(r2);
        const double raw = wrap_2pi(std::atan2(cross, dot));

        if (k == 0) {
            unwrapped = raw;
        } else {
            unwrapped += wrap_pm_pi(raw - prev_raw);
        }
        prev_raw = raw;

        double da = std::numeric_limits<double>::quiet_NaN();
        try {
            const double a1 = osculating_elements(s, 1).a;
            const double a2 = osculating_elements(s, 2).a;
            da = a2 - a1;
        } catch (const numerical_error&) {
            // Unbound sample (close encounter kick); leave the gap flagged.
        }

        series.t.push_back(s.t);
        series.zeta.push_back(unwrapped);
        series.delta_a.push_back(da);
        series.r_rel.push_back((s.moon2().position - s.moon1().position).norm());
    }
    return series;
}

std::vector<SwapEvent> detect_swaps(const ResonantSeries& series, double smoothing_window) {
    const std::size_t n = series.t.size();
    if (n < 2) throw invalid_input("detect_swaps: series too short");
    if (!(smoothing_window > 0.0)) {
        throw invalid_input("detect_swaps: smoothing_window must be positive");
    }
    const double span = series.t.back() - series.t.front();
    if (smoothing_window >= span) {
        throw invalid_input("detect_swaps: smoothing_window must be shorter than the series");
    }
    const double dt = (series.t.back() - series.t.front()) / static_cast<double>(n - 1);
    const std::size_t half = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.5 * smoothing_window / dt)));

    // Centered moving average via prefix sums, skipping NaN gaps.
    std::vector<double> sum(n + 1, 0.0);
    std::vector<std::size_t> cnt(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const double v = series.delta_a[k];
        const bool ok = std::isfinite(v);
        sum[k + 1] = sum[k] + (ok ? v : 0.0);
        cnt[k + 1] = cnt[k] + (ok ? 1u : 0u);
    }
    std::vector<double> smooth(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k > half ? k - half : 0;
        const std::size_t hi = std::min(n - 1, k + half);
        const std::size_t c = cnt[hi + 1] - cnt[lo];
        if (c > 0) smooth[k] = (sum[hi + 1] - sum[lo]) / static_cast<double>(c);
    }

    // Scan for sign changes between consecutive *decided* samples: NaN (a gap
    // the window never covered) and exact 0.0 (the average can land on the
    // axis when the window sum cancels to nothing) leave the sign undecided,
    // so a crossing buried under them is interpolated between its flanks
    // rather than lost.
    std::vector<SwapEvent> events;
    std::vector<std::size_t> crossing_index;
    int last_sign = 0;
    std::size_t last_k = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = smooth[k];
        if (!std::isfinite(v) || v == 0.0) continue;
        const int sign = v > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) {
            const double a = smooth[last_k];
            const double frac = a / (a - v);
            SwapEvent ev;
            ev.t_swap = series.t[last_k] + frac * (series.t[k] - series.t[last_k]);
            ev.direction = a < 0.0 ? SwapEvent::Direction::inner_to_outer
                                   : SwapEvent::Direction::outer_to_inner;
            events.push_back(ev);
            crossing_index.push_back((last_k + k) / 2);
        }
        last_sign = sign;
        last_k = k;
    }

    // Annotate each event with the closest approach nearby: the averaged
    // delta_a crosses zero exactly when the relative drift reverses, which is
    // when the moons are closest, so a few smoothing windows is plenty. Cap
    // the search at the midpoints to neighboring crossings.
    const std::size_t radius = 5 * half;
    for (std::size_t e = 0; e < events.size(); ++e) {
        const std::size_t k = crossing_index[e];
        std::size_t lo = k > radius ? k - radius : 0;
        std::size_t hi = std::min(n - 1, k + radius);
        if (e > 0) lo = std::max(lo, (crossing_index[e - 1] + k) / 2);
        if (e + 1 < events.size()) hi = std::min(hi, (k + crossing_index[e + 1]) / 2);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = lo; i <= hi; ++i) best = std::min(best, series.r_rel[i]);
        events[e].min_distance = best;
    }
    return events;
}

Regime classify_trajectory(const ResonantSeries& series) {
    const std::size_t n = series.zeta.size();
    if (n < 16) return Regime::undetermined;

    const auto [min_it, max_it] = std::minmax_element(series.zeta.begin(), series.zeta.end());
    const double z_min = *min_it;
    const double z_max = *max_it;
    const double range = z_max - z_min;

    // A full turn of the unwrapped angle means the moons lap each other.
    if (range >= 2.0 * kPi) return Regime::circulating;

    // Count trend reversals with hysteresis so per-orbit wiggles in zeta do
    // not register; two reversals mean at least one full libration was seen.
    const double eps = std::max(1e-12, 0.25 * range);
    int dir = 0;
    int reversals = 0;
    double extreme = series.zeta.front();
    const double start = series.zeta.front();
    for (double v : series.zeta) {
        if (dir == 0) {
            if (v > start + eps) {
                dir = 1;
                extreme = v;
            } else if (v < start - eps) {
                dir = -1;
                extreme = v;
            }
        } else if (dir == 1) {
            if (v > extreme) {
                extreme = v;
            } else if (v < extreme - eps) {
                ++reversals;
                dir = -1;
                extreme = v;
            }
        } else {
            if (v < extreme) {
                extreme = v;
            } else if (v > extreme + eps) {
                ++reversals;
                dir = 1;
                extreme = v;
            }
        }
    }
    if (reversals < 2) return Regime::undetermined;

    if (z_min > 0.0 && z_max < kPi) return Regime::tadpole_L4;
    if (z_min > kPi && z_max < 2.0 * kPi) return Regime::tadpole_L5;
    // Horseshoe turns enclose both triangular points and the anti-moon
    // configuration: the excursion reaches below 60 and above 300 degrees.
    if (z_min < kPi / 3.0 && z_max > 5.0 * kPi / 3.0) return Regime::horseshoe;
    return Regime::undetermined;
}

TrajectoryRecord rotating_frame(const TrajectoryRecord& traj, double omega) {
    TrajectoryRecord out = traj;
    for (SystemState& s : out.samples) {
        const double theta = -omega * s.t;
        const double c = std::cos(theta);
        const double sn = std::sin(theta);
        for (BodyState& b : s.bodies) {
            const Vec2 p = b.position;
            const Vec2 v_in(b.velocity.x() + omega * p.y(), b.velocity.y() - omega * p.x());
            b.position = Vec2(c * p.x() - sn * p.y(), sn * p.x() + c * p.y());
            b.velocity = Vec2(c * v_in.x() - sn * v_in.y(), sn * v_in.x() + c * v_in.y());
        }
    }
    return out;
}

namespace {

// Windowed least-squares projection power of `signal` onto
// {w cos(omega t), w sin(omega t)}: solve the 2x2 normal equations and
// return both the power (objective for the frequency search) and the
// amplitude hypot(c1, c2). Unlike a plain correlation |<s, w e^{-iwt}>|,
// the projection is exact for a finite sample of a pure tone even with the
// negative-frequency image overlapping the window's sidelobes.
struct Projection {
    double power = 0.0;
    double amplitude = 0.0;
};

Projection project_tone(const std::vector<double>& signal, const std::vector<double>& window,
                        double dt, double omega) {
    const std::size_t n = signal.size();
    double a11 = 0.0, a12 = 0.0, a22 = 0.0, r1 = 0.0, r2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = dt * static_cast<double>(k);
        const double b1 = window[k] * std::cos(omega * t);
        const double b2 = window[k] * std::sin(omega * t);
        const double y = window[k] * signal[k];
        a11 += b1 * b1;
        a12 += b1 * b2;
        a22 += b2 * b2;
        r1 += b1 * y;
        r2 += b2 * y;
    }
    const double det = a11 * a22 - a12 * a12;
    Projection p;
    if (det <= 0.0) return p;
    const double c1 = (a22 * r1 - a12 * r2) / det;
    const double c2 = (a11 * r2 - a12 * r1) / det;
    p.power = c1 * r1 + c2 * r2;
    p.amplitude = std::hypot(c1, c2);
    return p;
}

}  // namespace

Tone naff_frequency(const std::vector<double>& signal, double dt) {
    const std::size_t n = signal.size();
    if (n < 64) throw invalid_input("naff_frequency: need at least 64 samples");
    if (!(dt > 0.0)) throw invalid_input("naff_frequency: dt must be positive");

    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= static_cast<double>(n);

    const auto [mn, mx] = std::minmax_element(signal.begin(), signal.end());
    if (*mx - *mn == 0.0) return Tone{0.0, mean};

    std::vector<double> centered(n);
    for (std::size_t k = 0; k < n; ++k) centered[k] = signal[k] - mean;

    std::vector<double> window(n);
    for (std::size_t k = 0; k < n; ++k) {
        window[k] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n - 1)));
    }

    // Coarse peak from an FFT of the leading power-of-two block (mixed-radix
    // FFTs of awkward lengths buy nothing here: the refinement below works on
    // the full series and only needs a starting bin).
    std::size_t n_fft = 1;
    while (n_fft * 2 <= n) n_fft *= 2;
    std::vector<std::complex<double>> in(n_fft), spec(n_fft);
    for (std::size_t k = 0; k < n_fft; ++k) in[k] = centered[k] * window[k];
    Eigen::FFT<double> fft;
    fft.fwd(spec, in);

    std::size_t peak = 1;
    double peak_mag = 0.0;
    for (std::size_t k = 1; k <= n_fft / 2; ++k) {
        const double mag = std::norm(spec[k]);
        if (mag > peak_mag) {
            peak_mag = mag;
            peak = k;
        }
    }
    if (peak_mag == 0.0) return Tone{0.0, mean};

    const double bin = 2.0 * kPi / (static_cast<double>(n_fft) * dt);
    double lo = std::max(0.25 * bin, static_cast<double>(peak) * bin - 2.0 * bin);
    double hi = static_cast<double>(peak) * bin + 2.0 * bin;

    // Golden-section maximization of the projection power.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = project_tone(centered, window, dt, x1).power;
    double f2 = project_tone(centered, window, dt, x2).power;
    const double tol = 1e-13 * hi;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = project_tone(centered, window, dt, x2).power;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = project_tone(centered, window, dt, x1).power;
        }
    }
    const double omega = 0.5 * (lo + hi);
    return Tone{omega, project_tone(centered, window, dt, omega).amplitude};
}

double quasiperiodicity_index(const ResonantSeries& series) {
    const std::size_t n = series.zeta.size();
    if (n < 128) throw invalid_input("quasiperiodicity_index: need at least 128 samples");
    const double dt = (series.t.back() - series.t.front()) / static_cast<double>(n - 1);

    const std::size_t m = n / 2;
    const std::vector<double> first(series.zeta.begin(), series.zeta.begin() + static_cast<std::ptrdiff_t>(m));
    const std::vector<double> second(series.zeta.end() - static_cast<std::ptrdiff_t>(m), series.zeta.end());

    const double nu1 = naff_frequency(first, dt).frequency;
    const double nu2 = naff_frequency(second, dt).frequency;
    if (nu1 <= 0.0 || nu2 <= 0.0) {
        throw numerical_error("quasiperiodicity_index: libration frequency not resolved");
    }
    // Each half must itself cover a couple of libration cycles for the
    // frequencies to mean anything.
    const double cycles = nu1 * dt * static_cast<double>(m) / (2.0 * kPi);
    if (cycles < 1.5) {
        throw numerical_error("quasiperiodicity_index: series shorter than ~3 libration periods");
    }
    return std::abs(nu1 - nu2) / (0.5 * (nu1 + nu2));
}

}  // namespace coorb
