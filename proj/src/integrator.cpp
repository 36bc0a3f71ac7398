#include "coorb/integrator.hpp"

#include <cmath>

namespace coorb {

namespace {

constexpr double kZeroRadiusThreshold = 1e-6;  // canonical fallback for point masses

std::array<Vec2, 3> accel_at(const std::array<Vec2, 3>& r, const std::array<double, 3>& gm) {
    std::array<Vec2, 3> a{Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            const Vec2 d = r[j] - r[i];
            const double r2 = d.squaredNorm();
            if (r2 == 0.0) throw invalid_input("coincident bodies: gravitational singularity");
            const Vec2 f = d / (r2 * std::sqrt(r2));  // shared by both bodies
            a[i] += gm[j] * f;
            a[j] -= gm[i] * f;
        }
    }
    return a;
}

double pair_threshold(const SystemState& s, int i, int j) {
    const double sum = s.bodies[i].radius_phys + s.bodies[j].radius_phys;
    return sum > 0.0 ? sum : kZeroRadiusThreshold;
}

// Leapfrog state with the force at the current position cached, so verlet2
// costs one force evaluation per step and yoshida4 three.
struct Stepper {
    std::array<Vec2, 3> r, v;
    std::array<double, 3> gm;
    std::array<Vec2, 3> acc;

    explicit Stepper(const SystemState& s) {
        for (int i = 0; i < 3; ++i) {
            r[i] = s.bodies[i].position;
            v[i] = s.bodies[i].velocity;
            gm[i] = s.bodies[i].gm;
        }
        acc = accel_at(r, gm);
    }

    void kdk(double h) {
        const double hh = 0.5 * h;
        for (int i = 0; i < 3; ++i) v[i] += hh * acc[i];
        for (int i = 0; i < 3; ++i) r[i] += h * v[i];
        acc = accel_at(r, gm);
        for (int i = 0; i < 3; ++i) v[i] += hh * acc[i];
    }

    void advance(const IntegratorConfig& cfg) {
        if (cfg.scheme == Scheme::verlet2) {
            kdk(cfg.step);
        } else {
            // Yoshida's 4th-order triple jump: w1, w0, w1 with w0 = 1 - 2 w1.
            static const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
            static const double w0 = 1.0 - 2.0 * w1;
            kdk(w1 * cfg.step);
            kdk(w0 * cfg.step);
            kdk(w1 * cfg.step);
        }
    }

    void write_to(SystemState& s, double t) const {
        s.t = t;
        for (int i = 0; i < 3; ++i) {
            s.bodies[i].position = r[i];
            s.bodies[i].velocity = v[i];
        }
    }
};

}  // namespace

std::array<Vec2, 3> accelerations(const SystemState& state) {
    std::array<Vec2, 3> r;
    std::array<double, 3> gm;
    for (int i = 0; i < 3; ++i) {
        r[i] = state.bodies[i].position;
        gm[i] = state.bodies[i].gm;
    }
    return accel_at(r, gm);
}

double total_energy(const SystemState& state) {
    double e = 0.0;
    for (const auto& b : state.bodies) e += 0.5 * b.gm * b.velocity.squaredNorm();
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double d = (state.bodies[j].position - state.bodies[i].position).norm();
            e -= state.bodies[i].gm * state.bodies[j].gm / d;
        }
    return e;
}

double total_angular_momentum(const SystemState& state) {
    double l = 0.0;
    for (const auto& b : state.bodies)
        l += b.gm * (b.position.x() * b.velocity.y() - b.position.y() * b.velocity.x());
    return l;
}

SystemState step(const SystemState& state, const IntegratorConfig& cfg) {
    if (cfg.step <= 0.0) throw invalid_input("integrator step must be positive");
    Stepper s(state);
    s.advance(cfg);
    SystemState out = state;
    s.write_to(out, state.t + cfg.step);
    if (cfg.collision_check) {
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const double d = (out.bodies[j].position - out.bodies[i].position).norm();
                if (d < pair_threshold(out, i, j))
                    throw collision_error("bodies collided during step", out.t);
            }
    }
    return out;
}

TrajectoryRecord propagate(const SystemState& state, const IntegratorConfig& cfg, double t_end) {
    if (cfg.step <= 0.0) throw invalid_input("integrator step must be positive");
    if (cfg.output_stride < 1) throw invalid_input("output_stride must be >= 1");
    if (cfg.max_steps < 0) throw invalid_input("max_steps must be >= 0");
    check_valid(state);
    if (t_end < state.t) throw invalid_input("t_end precedes the initial time");

    const double span = t_end - state.t;
    std::int64_t n_steps =
        span > 0.0 ? static_cast<std::int64_t>(std::ceil(span / cfg.step - 1e-9)) : 0;

    TrajectoryRecord rec;
    if (n_steps > cfg.max_steps) {
        n_steps = cfg.max_steps;
        rec.stop = StopReason::max_steps;
    }

    const double e0 = total_energy(state);
    const double l0 = total_angular_momentum(state);
    const Vec2 bc0 = barycenter(state);
    const double e_scale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
    const double l_scale = std::abs(l0) > 0.0 ? std::abs(l0) : 1.0;

    rec.samples.reserve(static_cast<std::size_t>(n_steps / cfg.output_stride) + 2);
    auto record = [&](const SystemState& st) {
        rec.conservation.energy_rel_drift =
            std::max(rec.conservation.energy_rel_drift, std::abs(total_energy(st) - e0) / e_scale);
        rec.conservation.ang_momentum_rel_drift =
            std::max(rec.conservation.ang_momentum_rel_drift,
                     std::abs(total_angular_momentum(st) - l0) / l_scale);
        rec.conservation.barycenter_drift =
            std::max(rec.conservation.barycenter_drift, (barycenter(st) - bc0).norm());
        rec.samples.push_back(st);
    };

    record(state);

    auto find_collision = [&](const SystemState& st) -> CollisionInfo {
        if (!cfg.collision_check) return {};
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const double d = (st.bodies[j].position - st.bodies[i].position).norm();
                if (d < pair_threshold(st, i, j)) return {st.t, i, j, d};
            }
        return {};
    };

    if (CollisionInfo c = find_collision(state); c.body_a >= 0) {
        rec.stop = StopReason::collision;
        rec.collision = c;
        return rec;
    }

    Stepper s(state);
    SystemState current = state;
    for (std::int64_t k = 1; k <= n_steps; ++k) {
        s.advance(cfg);
        const double t_k = state.t + static_cast<double>(k) * cfg.step;
        const bool due = (k % cfg.output_stride == 0) || k == n_steps;
        if (due || cfg.collision_check) s.write_to(current, t_k);
        if (CollisionInfo c = find_collision(current); c.body_a >= 0) {
            rec.stop = StopReason::collision;
            rec.collision = c;
            record(current);
            return rec;
        }
        if (due) record(current);
    }
    return rec;
}

}  // namespace coorb
