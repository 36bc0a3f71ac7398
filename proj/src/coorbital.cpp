#include "coorb/coorbital.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace coorb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double angle) {
    double a = std::fmod(angle, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

void check_options(const ClassifyOptions& opts) {
    if (!(opts.zeta_min > 0.0)) throw invalid_input("zeta_min must be positive");
    if (!(opts.separatrix_tol >= 0.0)) throw invalid_input("separatrix_tol must be >= 0");
    // The cutoff must sit above the L3 separatrix or the horseshoe band vanishes.
    if (-potential_v(opts.zeta_min) <= kEnergyL3 + opts.separatrix_tol)
        throw invalid_input("zeta_min too large: E_L12 cutoff at or below the L3 separatrix");
}

// Solve E + V(zeta) = 0 on [lo, hi]; the bracket must straddle the root.
// Bisection narrows the bracket, then Newton polishes to the floating-point
// root. Leaving a residual E + V(lo) != 0 at the endpoint would cost the
// quadrature a sqrt-sized sliver of the period, so full polish matters.
double turning_point(double energy, double lo, double hi) {
    double flo = energy + potential_v(lo);
    const double fhi = energy + potential_v(hi);
    if ((flo > 0.0) == (fhi > 0.0))
        throw numerical_error("turning point bracket does not straddle a root");
    for (int i = 0; i < 80 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = energy + potential_v(mid);
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    double z = 0.5 * (lo + hi);
    for (int i = 0; i < 8; ++i) {
        const double f = energy + potential_v(z);
        const double d = potential_v_prime(z);
        if (d == 0.0) break;
        const double step = f / d;
        const double next = z - step;
        if (!(next > lo && next < hi)) break;
        z = next;
        if (std::abs(step) <= 1e-15 * std::abs(z)) break;
    }
    return z;
}

// Midpoint rule in theta after zeta = mid + half*sin(theta), which absorbs the
// inverse-square-root turning-point singularity: the transformed integrand is
// bounded and the node sums converge as O(h^2) until rounding in E + V(zeta)
// (a small difference of order-1 terms) sets a floor. Each doubling feeds a
// Richardson extrapolation; convergence is accepted either at 1e-9 directly
// or at the onset of the rounding floor if the last clean delta is small.
double quadrature_time(double energy, double zeta_lo, double zeta_hi) {
    const double mid = 0.5 * (zeta_lo + zeta_hi);
    const double half = 0.5 * (zeta_hi - zeta_lo);
    auto integral = [&](int n) {
        const double h = kPi / n;
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            const double theta = -0.5 * kPi + (k + 0.5) * h;
            const double zeta = mid + half * std::sin(theta);
            const double g = energy + potential_v(zeta);
            if (g > 0.0) sum += half * std::cos(theta) / std::sqrt(2.0 * g);
        }
        return sum * h;
    };
    double prev = integral(128);
    double prev_delta = std::numeric_limits<double>::infinity();
    double best_delta = std::numeric_limits<double>::infinity();
    double best = prev;
    for (int n = 256; n <= (1 << 20); n *= 2) {
        const double cur = integral(n);
        const double delta = std::abs(cur - prev);
        const double extrapolated = cur + (cur - prev) / 3.0;
        if (delta <= 1e-9 * std::abs(cur)) return extrapolated;
        if (delta < best_delta) {
            best_delta = delta;
            best = extrapolated;
        }
        // In the O(h^2) regime each doubling shrinks the delta fourfold; once
        // that stops (past the pre-asymptotic levels) the sum is walking on
        // the rounding floor and further refinement only adds noise.
        if (n >= 8192 && delta > 0.5 * prev_delta) break;
        prev = cur;
        prev_delta = delta;
    }
    if (best_delta <= 3e-8 * std::abs(best)) return best;
    throw numerical_error("libration quadrature did not converge (energy too close to a separatrix)");
}

}  // namespace

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::tadpole_L4: return "tadpole_L4";
        case Regime::tadpole_L5: return "tadpole_L5";
        case Regime::horseshoe: return "horseshoe";
        case Regime::circulating: return "circulating";
        case Regime::separatrix: return "separatrix";
        case Regime::infeasible: return "infeasible";
        case Regime::undetermined: return "undetermined";
    }
    return "undetermined";
}

double energy_cutoff(const ClassifyOptions& opts) {
    check_options(opts);
    return -potential_v(opts.zeta_min);
}

double potential_v(double zeta) {
    const double c = std::cos(zeta);
    if (c >= 1.0) throw invalid_input("potential_v singular at zeta = 0 (moon collision direction)");
    return c - 1.0 / std::sqrt(2.0 - 2.0 * c);
}

double potential_v_prime(double zeta) {
    const double c = std::cos(zeta);
    if (c >= 1.0) throw invalid_input("potential_v singular at zeta = 0 (moon collision direction)");
    const double q = 2.0 - 2.0 * c;
    return std::sin(zeta) * (1.0 / (q * std::sqrt(q)) - 1.0);
}

double coorbital_energy(double zeta, double u) { return 0.5 * u * u - potential_v(zeta); }

CoorbitalPoint coorbital_point(double zeta, double u, const ClassifyOptions& opts) {
    CoorbitalPoint p;
    p.zeta = zeta;
    p.u = u;
    p.energy = coorbital_energy(zeta, u);
    p.regime = classify_energy(p.energy, zeta, opts);
    return p;
}

std::pair<double, double> reduced_flow(const CoorbitalPoint& point, double mu) {
    if (!(mu > 0.0)) throw invalid_input("mu must be positive");
    return {point.u, potential_v_prime(point.zeta)};
}

Regime classify_energy(double energy, double zeta, const ClassifyOptions& opts) {
    const double cutoff = energy_cutoff(opts);  // validates opts
    if (std::abs(energy - kEnergyL3) < opts.separatrix_tol) return Regime::separatrix;
    if (std::abs(energy - cutoff) < opts.separatrix_tol) return Regime::separatrix;
    if (energy < kEnergyL4) return Regime::infeasible;
    if (energy < kEnergyL3)
        return wrap_2pi(zeta) <= kPi ? Regime::tadpole_L4 : Regime::tadpole_L5;
    if (energy < cutoff) return Regime::horseshoe;
    return Regime::circulating;
}

double libration_period(double energy, double mu, double n, const ClassifyOptions& opts) {
    if (!(mu > 0.0)) throw invalid_input("mu must be positive");
    if (!(n > 0.0)) throw invalid_input("mean motion must be positive");
    check_options(opts);
    if (energy < kEnergyL4) throw invalid_input("energy below the L4/L5 minimum: no libration");
    if (std::abs(energy - kEnergyL3) < std::max(opts.separatrix_tol, 1e-12))
        throw numerical_error("energy on the L3 separatrix: period diverges");

    const double time_scale = 1.0 / (n * std::sqrt(3.0 * mu));
    if (energy - kEnergyL4 < 1e-13)  // degenerate orbit at the fixed point: harmonic limit
        return kTwoPi / tadpole_frequency(mu, n);

    // Inner bracket edge: V(1e-6) ~ -1e6, classically forbidden for any
    // energy of interest (and small enough that cos() is still below 1).
    constexpr double kZetaFloor = 1e-6;
    double tau;
    if (energy < kEnergyL3) {
        // Tadpole: turning points straddle the 60-degree maximum of V.
        const double lo = turning_point(energy, kZetaFloor, kPi / 3.0);
        const double hi = turning_point(energy, kPi / 3.0, kPi);
        tau = 2.0 * quadrature_time(energy, lo, hi);
    } else {
        // Horseshoe: allowed range [zeta_min, 2 pi - zeta_min]; by the
        // zeta <-> 2 pi - zeta symmetry integrate to pi and double again.
        const double lo = turning_point(energy, kZetaFloor, kPi / 3.0);
        tau = 4.0 * quadrature_time(energy, lo, kPi);
    }
    return tau * time_scale;
}

double tadpole_frequency(double mu, double n) {
    if (!(mu > 0.0) || !(n > 0.0)) throw invalid_input("mu and n must be positive");
    return n * std::sqrt(27.0 * mu / 4.0);
}

double delta_a_from_u(double u, double mu, double a_ref) {
    return -(2.0 / 3.0) * std::sqrt(3.0 * mu) * u * a_ref;
}

double u_from_delta_a(double delta_a, double mu, double a_ref) {
    return -1.5 * delta_a / (std::sqrt(3.0 * mu) * a_ref);
}

PhasePortrait phase_portrait(double mu, const PortraitSpec& spec, const ClassifyOptions& opts,
                             int threads) {
    if (!(mu > 0.0)) throw invalid_input("mu must be positive");
    if (spec.n_zeta < 2 || spec.n_u < 2) throw invalid_input("portrait grid needs >= 2 points per axis");
    if (!(spec.zeta_lo > 0.0) || !(spec.zeta_hi < kTwoPi) || !(spec.zeta_lo < spec.zeta_hi))
        throw invalid_input("portrait zeta range must stay strictly inside (0, 360) degrees");
    if (!(spec.u_lo < spec.u_hi)) throw invalid_input("portrait u range is empty");
    if (threads < 1) throw invalid_input("threads must be >= 1");

    PhasePortrait out;
    out.spec = spec;
    out.mu = mu;
    out.energy_l12 = energy_cutoff(opts);
    out.grid.resize(static_cast<std::size_t>(spec.n_zeta) * spec.n_u);

    auto fill_rows = [&](int row_begin, int row_end) {
        for (int iu = row_begin; iu < row_end; ++iu) {
            const double u = out.u_value(iu);
            for (int iz = 0; iz < spec.n_zeta; ++iz)
                out.grid[static_cast<std::size_t>(iu) * spec.n_zeta + iz] =
                    coorbital_point(out.zeta_value(iz), u, opts);
        }
    };

    const int workers = std::min(threads, spec.n_u);
    if (workers == 1) {
        fill_rows(0, spec.n_u);
    } else {
        std::vector<std::thread> pool;
        const int rows_each = (spec.n_u + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int begin = w * rows_each;
            const int end = std::min(spec.n_u, begin + rows_each);
            if (begin < end) pool.emplace_back(fill_rows, begin, end);
        }
        for (auto& t : pool) t.join();
    }
    return out;
}

}  // namespace coorb
