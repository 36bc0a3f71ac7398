#include "coorb/equilibria.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "coorb/integrator.hpp"

namespace coorb {

namespace {

constexpr double kDeg60 = 1.0471975511965976;  // pi/3

void require_masses(const std::array<double, 3>& m) {
    int positive = 0;
    for (double gm : m) {
        if (gm < 0.0) throw invalid_input("negative gm");
        if (gm > 0.0) ++positive;
    }
    if (positive < 2) throw invalid_input("need at least two massive bodies");
}

double quintic_derivative(const std::array<double, 3>& m, double rho) {
    const auto [ma, mb, mc] = m;
    return 5.0 * (ma + mb) * rho * rho * rho * rho + 4.0 * (3.0 * ma + 2.0 * mb) * rho * rho * rho +
           3.0 * (3.0 * ma + mb) * rho * rho - 2.0 * (mb + 3.0 * mc) * rho - (2.0 * mb + 3.0 * mc);
}

double solve_quintic(const std::array<double, 3>& m) {
    // Bracket the unique positive root on a log grid, then bisect + polish.
    double lo = 1e-6, hi = 1e6;
    double flo = euler_quintic(m, lo);
    bool bracketed = false;
    for (double x = lo * 1.5; x <= hi; x *= 1.5) {
        const double fx = euler_quintic(m, x);
        if ((flo < 0.0) != (fx < 0.0)) {
            hi = x;
            bracketed = true;
            break;
        }
        lo = x;
        flo = fx;
    }
    if (!bracketed) throw numerical_error("Euler quintic: no sign change in (1e-6, 1e6)");

    int iters = 0;
    while (hi - lo > 1e-8 * std::max(1.0, lo)) {
        if (++iters > 200) throw numerical_error("Euler quintic: bisection did not converge");
        const double mid = 0.5 * (lo + hi);
        if ((euler_quintic(m, mid) < 0.0) == (flo < 0.0))
            lo = mid;
        else
            hi = mid;
    }
    double rho = 0.5 * (lo + hi);
    for (int k = 0; k < 40; ++k) {
        const double f = euler_quintic(m, rho);
        const double df = quintic_derivative(m, rho);
        const double next = rho - f / df;
        if (!(next > 0.0) || !std::isfinite(next)) break;
        const double change = std::abs(next - rho);
        rho = next;
        if (change < 1e-14 * rho) return rho;
    }
    return rho;
}

// Angular rate from the force balance a_i = -omega^2 r_i, read off the body
// farthest from the barycenter (never at the origin).
double omega_from_balance(const std::array<double, 3>& masses, const std::array<Vec2, 3>& pos) {
    SystemState s;
    for (int i = 0; i < 3; ++i) {
        s.bodies[i].position = pos[i];
        s.bodies[i].gm = masses[i];
    }
    const auto acc = accelerations(s);
    int far = 0;
    for (int i = 1; i < 3; ++i)
        if (pos[i].squaredNorm() > pos[far].squaredNorm()) far = i;
    const double w2 = -acc[far].dot(pos[far]) / pos[far].squaredNorm();
    if (!(w2 > 0.0)) throw numerical_error("non-positive omega^2 at equilibrium candidate");
    return std::sqrt(w2);
}

}  // namespace

double euler_quintic(const std::array<double, 3>& m, double rho) {
    const auto [ma, mb, mc] = m;
    return (ma + mb) * std::pow(rho, 5) + (3.0 * ma + 2.0 * mb) * std::pow(rho, 4) +
           (3.0 * ma + mb) * std::pow(rho, 3) - (mb + 3.0 * mc) * rho * rho -
           (2.0 * mb + 3.0 * mc) * rho - (mb + mc);
}

EquilibriumConfig euler_collinear(const std::array<double, 3>& masses,
                                  const std::array<int, 3>& order, double separation) {
    require_masses(masses);
    if (separation <= 0.0) throw invalid_input("separation must be positive");
    std::array<int, 3> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != std::array<int, 3>{0, 1, 2}) throw invalid_input("order must permute {0,1,2}");

    // Canonical reading direction: central body before moon1.
    std::array<int, 3> seq = order;
    const auto pos_of = [&](int body) {
        return static_cast<int>(std::find(seq.begin(), seq.end(), body) - seq.begin());
    };
    if (pos_of(0) > pos_of(1)) std::reverse(seq.begin(), seq.end());

    const std::array<double, 3> m_ltr = {masses[seq[0]], masses[seq[1]], masses[seq[2]]};
    const double rho = solve_quintic(m_ltr);

    // Unit A-B gap, then recenter and rescale to the requested outer span.
    std::array<double, 3> x_ltr = {0.0, 1.0, 1.0 + rho};
    const double mtot = m_ltr[0] + m_ltr[1] + m_ltr[2];
    const double com = (m_ltr[0] * x_ltr[0] + m_ltr[1] * x_ltr[1] + m_ltr[2] * x_ltr[2]) / mtot;
    const double scale = separation / (1.0 + rho);
    for (double& x : x_ltr) x = (x - com) * scale;

    EquilibriumConfig cfg;
    cfg.masses = masses;
    cfg.separation = separation;
    for (int k = 0; k < 3; ++k) cfg.positions[seq[k]] = Vec2(x_ltr[k], 0.0);
    cfg.angular_rate = omega_from_balance(masses, cfg.positions);

    const int where_moon2 = pos_of(2);
    const int where_central = pos_of(0);
    if (where_moon2 == 1)
        cfg.kind = EquilibriumKind::euler_L1;  // central, moon2, moon1
    else if (where_central == 1)
        cfg.kind = EquilibriumKind::euler_L3;  // moon2, central, moon1
    else
        cfg.kind = EquilibriumKind::euler_L2;  // central, moon1, moon2
    return cfg;
}

EquilibriumConfig lagrange_equilateral(const std::array<double, 3>& masses, double separation,
                                       EquilibriumKind sense) {
    require_masses(masses);
    if (separation <= 0.0) throw invalid_input("separation must be positive");
    if (sense != EquilibriumKind::lagrange_L4 && sense != EquilibriumKind::lagrange_L5)
        throw invalid_input("sense must be lagrange_L4 or lagrange_L5");

    const double sign = sense == EquilibriumKind::lagrange_L4 ? 1.0 : -1.0;
    std::array<Vec2, 3> pos = {
        Vec2(0.0, 0.0),
        Vec2(separation, 0.0),
        separation * Vec2(std::cos(kDeg60), sign * std::sin(kDeg60)),
    };
    const double mtot = masses[0] + masses[1] + masses[2];
    Vec2 com = Vec2::Zero();
    for (int i = 0; i < 3; ++i) com += masses[i] * pos[i];
    com /= mtot;
    for (auto& p : pos) p -= com;

    EquilibriumConfig cfg;
    cfg.kind = sense;
    cfg.masses = masses;
    cfg.separation = separation;
    cfg.positions = pos;
    cfg.angular_rate = std::sqrt(mtot / (separation * separation * separation));
    return cfg;
}

SystemState equilibrium_state(const EquilibriumConfig& cfg) {
    SystemState s;
    for (int i = 0; i < 3; ++i) {
        s.bodies[i].gm = cfg.masses[i];
        s.bodies[i].position = cfg.positions[i];
        const Vec2 r = cfg.positions[i];
        s.bodies[i].velocity = cfg.angular_rate * Vec2(-r.y(), r.x());
    }
    return s;
}

double rotating_residual(const EquilibriumConfig& cfg) {
    SystemState s = equilibrium_state(cfg);
    const auto acc = accelerations(s);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Vec2 res = acc[i] + cfg.angular_rate * cfg.angular_rate * cfg.positions[i];
        worst = std::max(worst, res.norm());
    }
    return worst;
}

std::pair<bool, double> gascheau_stable(const std::array<double, 3>& masses) {
    for (double gm : masses)
        if (gm < 0.0) throw invalid_input("negative gm");
    const auto [m1, m2, m3] = masses;
    const double sum = m1 + m2 + m3;
    if (sum <= 0.0) throw invalid_input("total mass must be positive");
    const double margin = 27.0 * (m1 * m2 + m1 * m3 + m2 * m3) / (sum * sum);
    return {margin < 1.0, margin};
}

double max_growth_rate(const EquilibriumConfig& cfg) {
    // Linearized co-rotating dynamics about the equilibrium:
    //   d(dr)/dt = dv,  d(dv)/dt = (G + omega^2 I) dr + 2 omega J dv
    // with G the gravity gradient, which is closed-form for a pairwise field:
    //   da_i/dr_j = gm_j (I - 3 n n^T)/|d|^3,  d = r_j - r_i,  n = d/|d|.
    // Everything is assembled in units of the separation and 1/omega; without
    // that scaling the identity block dwarfs the gravity blocks and the
    // eigensolver loses the slow (stable-tadpole) pair in rounding noise.
    const double len = cfg.separation;
    const double omega = cfg.angular_rate;
    if (!(len > 0.0) || !(omega > 0.0)) {
        throw invalid_input("equilibrium configuration lacks a positive separation or spin");
    }

    using Mat2 = Eigen::Matrix2d;
    std::array<std::array<Mat2, 3>, 3> grad;
    for (auto& row : grad)
        for (Mat2& block : row) block.setZero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            const Vec2 d = (cfg.positions[j] - cfg.positions[i]) / len;
            const double r2 = d.squaredNorm();
            if (!(r2 > 0.0)) throw invalid_input("coincident bodies in equilibrium configuration");
            const double gm_scaled = cfg.masses[j] / (len * len * len * omega * omega);
            const Mat2 block = gm_scaled / (r2 * std::sqrt(r2)) *
                               (Mat2::Identity() - 3.0 / r2 * (d * d.transpose()));
            grad[i][j] = block;
            grad[i][i] -= block;
        }
    }

    Eigen::Matrix<double, 12, 12> jac = Eigen::Matrix<double, 12, 12>::Zero();
    for (int i = 0; i < 3; ++i) {
        jac.block<2, 2>(2 * i, 6 + 2 * i) = Mat2::Identity();
        for (int j = 0; j < 3; ++j) jac.block<2, 2>(6 + 2 * i, 2 * j) = grad[i][j];
        jac.block<2, 2>(6 + 2 * i, 2 * i) += Mat2::Identity();  // centrifugal, omega = 1
        jac(6 + 2 * i, 6 + 2 * i + 1) = 2.0;                    // Coriolis
        jac(6 + 2 * i + 1, 6 + 2 * i) = -2.0;
    }

    const Eigen::EigenSolver<Eigen::Matrix<double, 12, 12>> solver(jac, false);
    return solver.eigenvalues().real().maxCoeff() * omega;
}

double euler_unstable_check(const EquilibriumConfig& cfg) {
    if (cfg.kind != EquilibriumKind::euler_L1 && cfg.kind != EquilibriumKind::euler_L2 &&
        cfg.kind != EquilibriumKind::euler_L3)
        throw invalid_input("euler_unstable_check requires a collinear configuration");
    return max_growth_rate(cfg);
}

}  // namespace coorb
