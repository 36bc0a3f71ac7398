#include "coorb/core.hpp"

#include <cmath>
#include <numbers>

namespace coorb {

double total_gm(const SystemState& s) {
    return s.bodies[0].gm + s.bodies[1].gm + s.bodies[2].gm;
}

Vec2 barycenter(const SystemState& s) {
    Vec2 num = Vec2::Zero();
    for (const auto& b : s.bodies) num += b.gm * b.position;
    return num / total_gm(s);
}

Vec2 barycenter_velocity(const SystemState& s) {
    Vec2 num = Vec2::Zero();
    for (const auto& b : s.bodies) num += b.gm * b.velocity;
    return num / total_gm(s);
}

void check_valid(const SystemState& s) {
    for (const auto& b : s.bodies) {
        if (!b.position.allFinite() || !b.velocity.allFinite())
            throw invalid_input("non-finite body state");
        if (b.gm < 0.0) throw invalid_input("negative gm");
        if (b.radius_phys < 0.0) throw invalid_input("negative body radius");
    }
    if (total_gm(s) <= 0.0) throw invalid_input("all bodies massless");
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (s.bodies[i].position == s.bodies[j].position)
                throw invalid_input("coincident bodies");
}

SystemState recenter(const SystemState& s) {
    SystemState out = s;
    const Vec2 rc = barycenter(s);
    const Vec2 vc = barycenter_velocity(s);
    for (auto& b : out.bodies) {
        b.position -= rc;
        b.velocity -= vc;
    }
    return out;
}

std::pair<SystemState, UnitSystem> normalize(const SystemState& system, double ref_radius) {
    if (system.central().gm <= 0.0) throw invalid_input("central body gm must be positive");
    if (ref_radius <= 0.0) throw invalid_input("reference radius must be positive");

    UnitSystem u;
    u.length_unit = ref_radius;
    u.time_unit = std::sqrt(ref_radius * ref_radius * ref_radius / system.central().gm);
    u.gm_unit = system.central().gm;  // = length_unit^3 / time_unit^2 by construction

    SystemState out = system;
    out.t = system.t / u.time_unit;
    for (auto& b : out.bodies) {
        b.position /= u.length_unit;
        b.velocity /= u.velocity_unit();
        b.gm /= u.gm_unit;
        b.radius_phys /= u.length_unit;
    }
    return {out, u};
}

SystemState to_physical(const SystemState& canonical, const UnitSystem& units) {
    SystemState out = canonical;
    out.t = canonical.t * units.time_unit;
    for (auto& b : out.bodies) {
        b.position *= units.length_unit;
        b.velocity *= units.velocity_unit();
        b.gm *= units.gm_unit;
        b.radius_phys *= units.length_unit;
    }
    return out;
}

double kepler_period(double a, double gm_total) {
    if (a <= 0.0) throw invalid_input("semi-major axis must be positive");
    if (gm_total <= 0.0) throw invalid_input("gm must be positive");
    return 2.0 * std::numbers::pi * std::sqrt(a * a * a / gm_total);
}

double synodic_catchup_time(double a, double delta_a, double gm_total) {
    if (delta_a == 0.0) throw invalid_input("delta_a = 0: synodic drift time is infinite");
    return kepler_period(a, gm_total) / (1.5 * std::abs(delta_a) / a);
}

}  // namespace coorb
