#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "coorb/analysis.hpp"
#include "coorb/equilibria.hpp"
#include "coorb/errors.hpp"
#include "coorb/scenario.hpp"

namespace coorb {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;
constexpr double kSecondsPerYear = 365.25 * 86400.0;

std::string num(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return buf;
}

// Files are accumulated here so the manifest can name every artifact with its
// checksum, written or skipped.
struct FileLog {
    std::string out_dir;
    ordered_json entries = ordered_json::array();
    std::vector<std::string> names;

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out) throw numerical_error("cannot write output file: " + name);
        out << content;
        out.close();
        ordered_json e;
        e["name"] = name;
        e["bytes"] = content.size();
        e["fnv1a64"] = fnv1a64_hex(content);
        entries.push_back(e);
        names.push_back(name);
    }
};

SystemState state_from_config(const ScenarioConfig& cfg) {
    SystemState s;
    s.t = 0.0;
    for (int i = 0; i < 3; ++i) {
        const BodySpec& b = cfg.bodies[static_cast<std::size_t>(i)];
        BodyState& body = s.bodies[static_cast<std::size_t>(i)];
        body.gm = b.gm_km3s2;
        body.radius_phys = b.radius_km;
        body.position = Vec2(b.x_km, b.y_km);
        body.velocity = Vec2(b.vx_kms, b.vy_kms);
    }
    return s;
}

bool wants(const std::vector<OutputKind>& outputs, OutputKind kind) {
    return std::find(outputs.begin(), outputs.end(), kind) != outputs.end();
}

std::string trajectory_csv(const TrajectoryRecord& rec) {
    std::string out = "t_s";
    for (int i = 1; i <= 3; ++i) {
        const std::string n = std::to_string(i);
        out += ",x" + n + "_km,y" + n + "_km,vx" + n + "_kms,vy" + n + "_kms";
    }
    out += "\n";
    for (const SystemState& s : rec.samples) {
        out += num(s.t);
        for (const BodyState& b : s.bodies) {
            out += "," + num(b.position.x()) + "," + num(b.position.y()) + "," +
                   num(b.velocity.x()) + "," + num(b.velocity.y());
        }
        out += "\n";
    }
    return out;
}

ordered_json table_json(const std::vector<std::string>& columns,
                        const std::vector<std::vector<double>>& rows) {
    ordered_json j;
    j["columns"] = columns;
    ordered_json data = ordered_json::array();
    for (const auto& row : rows) data.push_back(row);
    j["data"] = data;
    return j;
}

ordered_json trajectory_json(const TrajectoryRecord& rec) {
    std::vector<std::string> columns = {"t_s"};
    for (int i = 1; i <= 3; ++i) {
        const std::string n = std::to_string(i);
        for (const char* f : {"x", "y", "vx", "vy"}) {
            columns.push_back(f + n + (f[0] == 'v' ? "_kms" : "_km"));
        }
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(rec.samples.size());
    for (const SystemState& s : rec.samples) {
        std::vector<double> row = {s.t};
        for (const BodyState& b : s.bodies) {
            row.push_back(b.position.x());
            row.push_back(b.position.y());
            row.push_back(b.velocity.x());
            row.push_back(b.velocity.y());
        }
        rows.push_back(std::move(row));
    }
    return table_json(columns, rows);
}

std::string series_csv(const ResonantSeries& series) {
    std::string out = "t_s,zeta_deg,delta_a_km,r_rel_km\n";
    for (std::size_t k = 0; k < series.t.size(); ++k) {
        out += num(series.t[k]) + "," + num(series.zeta[k] * 180.0 / kPi) + "," +
               num(series.delta_a[k]) + "," + num(series.r_rel[k]) + "\n";
    }
    return out;
}

ordered_json series_json(const ResonantSeries& series) {
    std::vector<std::vector<double>> rows;
    rows.reserve(series.t.size());
    for (std::size_t k = 0; k < series.t.size(); ++k) {
        rows.push_back({series.t[k], series.zeta[k] * 180.0 / kPi, series.delta_a[k],
                        series.r_rel[k]});
    }
    return table_json({"t_s", "zeta_deg", "delta_a_km", "r_rel_km"}, rows);
}

const char* direction_name(SwapEvent::Direction d) {
    return d == SwapEvent::Direction::inner_to_outer ? "inner_to_outer" : "outer_to_inner";
}

std::string swaps_csv(const std::vector<SwapEvent>& events) {
    std::string out = "t_swap_s,min_distance_km,direction\n";
    for (const SwapEvent& ev : events) {
        out += num(ev.t_swap) + "," + num(ev.min_distance) + "," + direction_name(ev.direction) +
               "\n";
    }
    return out;
}

ordered_json swaps_json(const std::vector<SwapEvent>& events) {
    ordered_json arr = ordered_json::array();
    for (const SwapEvent& ev : events) {
        ordered_json e;
        e["t_swap_s"] = ev.t_swap;
        e["min_distance_km"] = ev.min_distance;
        e["direction"] = direction_name(ev.direction);
        arr.push_back(e);
    }
    ordered_json j;
    j["swaps"] = arr;
    return j;
}

ordered_json portrait_json(const PhasePortrait& portrait, double zeta_min_deg) {
    ordered_json j;
    j["mu"] = portrait.mu;
    j["zeta_min_deg"] = zeta_min_deg;
    j["energy_l4"] = kEnergyL4;
    j["energy_l3"] = portrait.energy_l3;
    j["energy_l12"] = portrait.energy_l12;
    ordered_json grid;
    grid["zeta_lo_deg"] = portrait.spec.zeta_lo * 180.0 / kPi;
    grid["zeta_hi_deg"] = portrait.spec.zeta_hi * 180.0 / kPi;
    grid["n_zeta"] = portrait.spec.n_zeta;
    grid["u_lo"] = portrait.spec.u_lo;
    grid["u_hi"] = portrait.spec.u_hi;
    grid["n_u"] = portrait.spec.n_u;
    j["grid"] = grid;
    ordered_json legend;
    for (int code = 0; code <= static_cast<int>(Regime::undetermined); ++code) {
        legend[std::to_string(code)] = regime_name(static_cast<Regime>(code));
    }
    j["legend"] = legend;
    ordered_json rows = ordered_json::array();
    for (int iu = 0; iu < portrait.spec.n_u; ++iu) {
        std::vector<int> row(static_cast<std::size_t>(portrait.spec.n_zeta));
        for (int iz = 0; iz < portrait.spec.n_zeta; ++iz) {
            row[static_cast<std::size_t>(iz)] = static_cast<int>(portrait.at(iu, iz).regime);
        }
        rows.push_back(row);
    }
    j["regimes"] = rows;
    return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

RunOutcome run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    FileLog log;
    log.out_dir = out_dir;

    RunOutcome outcome;
    std::string status = "ok";
    std::string error_msg;
    bool partial = false;
    ordered_json run_info;
    ordered_json skipped = ordered_json::array();

    run_info["preset"] = cfg.preset;
    run_info["scheme"] = cfg.scheme == Scheme::verlet2 ? "verlet2" : "yoshida4";
    run_info["seed"] = cfg.seed;
    run_info["duration_s"] = cfg.duration_s;

    try {
        const std::vector<OutputKind>& outputs = cfg.outputs;
        const bool needs_traj = std::any_of(outputs.begin(), outputs.end(),
                                            [](OutputKind k) { return k != OutputKind::portrait; });
        const bool needs_series =
            wants(outputs, OutputKind::resonant_series) || wants(outputs, OutputKind::swaps) ||
            wants(outputs, OutputKind::classification) || wants(outputs, OutputKind::frequencies);

        SystemState phys = state_from_config(cfg);
        check_valid(phys);
        phys = recenter(phys);

        const double ref_radius = cfg.ref_radius_km > 0.0
                                      ? cfg.ref_radius_km
                                      : (phys.moon1().position - phys.central().position).norm();
        auto [canon, units] = normalize(phys, ref_radius);

        const double t_orb_canon = kepler_period(1.0, total_gm(canon));
        const double t_orb_s = t_orb_canon * units.time_unit;
        const double mu = cfg.portrait_mu > 0.0
                              ? cfg.portrait_mu
                              : (canon.moon1().gm + canon.moon2().gm) / total_gm(canon);

        run_info["ref_radius_km"] = ref_radius;
        run_info["ref_period_s"] = t_orb_s;
        run_info["mu"] = mu;

        ClassifyOptions copts;
        copts.zeta_min = cfg.zeta_min_deg * kPi / 180.0;

        TrajectoryRecord rec_phys;
        if (needs_traj) {
            if (cfg.duration_s <= 0.0) {
                throw config_error("duration must be positive for trajectory outputs");
            }
            if (cfg.perturb_kms > 0.0) {
                std::mt19937_64 rng(cfg.seed);
                std::normal_distribution<double> gauss(0.0, cfg.perturb_kms / units.velocity_unit());
                for (int m = 1; m <= 2; ++m) {
                    BodyState& body = canon.bodies[static_cast<std::size_t>(m)];
                    body.velocity.x() += gauss(rng);
                    body.velocity.y() += gauss(rng);
                }
            }

            IntegratorConfig icfg;
            icfg.scheme = cfg.scheme;
            const double step_s = cfg.step_s > 0.0 ? cfg.step_s : t_orb_s / 2000.0;
            icfg.step = step_s / units.time_unit;
            icfg.max_steps = cfg.max_steps;
            const double t_end = cfg.duration_s / units.time_unit;
            const auto n_steps = static_cast<std::int64_t>(std::ceil(t_end / icfg.step - 1e-9));
            icfg.output_stride = cfg.output_stride > 0 ? cfg.output_stride
                                                       : std::max<std::int64_t>(1, (n_steps + 19999) / 20000);

            run_info["step_s"] = step_s;
            run_info["output_stride"] = icfg.output_stride;

            TrajectoryRecord rec = propagate(canon, icfg, t_end);
            outcome.stop = rec.stop;
            rec_phys = rec;
            for (SystemState& s : rec_phys.samples) s = to_physical(s, units);

            run_info["samples"] = rec_phys.samples.size();
            ordered_json cons;
            cons["energy_rel_drift"] = rec.conservation.energy_rel_drift;
            cons["ang_momentum_rel_drift"] = rec.conservation.ang_momentum_rel_drift;
            cons["barycenter_drift_km"] = rec.conservation.barycenter_drift * units.length_unit;
            run_info["conservation"] = cons;

            if (rec.stop == StopReason::collision) {
                status = "collision";
                outcome.exit_code = 3;
                partial = true;
                ordered_json c;
                c["t_s"] = rec.collision.t * units.time_unit;
                c["body_a"] = rec.collision.body_a;
                c["body_b"] = rec.collision.body_b;
                c["distance_km"] = rec.collision.distance * units.length_unit;
                run_info["collision"] = c;
            } else if (rec.stop == StopReason::max_steps) {
                partial = true;
                run_info["truncated_at_max_steps"] = true;
            }
        }

        ResonantSeries series;
        if (needs_series && rec_phys.samples.size() >= 2) {
            series = resonant_series(rec_phys);
        }

        // On a collision abort, write whatever outputs the partial record
        // still supports and note the rest in the manifest instead of dying.
        auto guarded = [&](OutputKind kind, auto&& writer) {
            if (!wants(outputs, kind)) return;
            try {
                writer();
            } catch (const std::exception& err) {
                if (!partial) throw;
                ordered_json sk;
                sk["output"] = output_kind_name(kind);
                sk["reason"] = err.what();
                skipped.push_back(sk);
            }
        };

        guarded(OutputKind::trajectory, [&] {
            if (cfg.format == "json") {
                log.write("trajectory.json", dump(trajectory_json(rec_phys)));
            } else {
                log.write("trajectory.csv", trajectory_csv(rec_phys));
            }
        });

        guarded(OutputKind::resonant_series, [&] {
            if (series.t.empty()) throw numerical_error("no usable samples");
            if (cfg.format == "json") {
                log.write("resonant_series.json", dump(series_json(series)));
            } else {
                log.write("resonant_series.csv", series_csv(series));
            }
        });

        guarded(OutputKind::swaps, [&] {
            if (series.t.empty()) throw numerical_error("no usable samples");
            const double span = series.t.back() - series.t.front();
            const double window =
                cfg.swap_window_s > 0.0 ? cfg.swap_window_s : std::min(2.0 * t_orb_s, span / 8.0);
            const std::vector<SwapEvent> events = detect_swaps(series, window);
            run_info["swap_count"] = events.size();
            if (cfg.format == "json") {
                log.write("swaps.json", dump(swaps_json(events)));
            } else {
                log.write("swaps.csv", swaps_csv(events));
            }
        });

        guarded(OutputKind::classification, [&] {
            if (series.t.empty()) throw numerical_error("no usable samples");
            const Regime regime = classify_trajectory(series);
            const auto [mn, mx] = std::minmax_element(series.zeta.begin(), series.zeta.end());
            ordered_json j;
            j["regime"] = regime_name(regime);
            j["zeta_min_deg"] = *mn * 180.0 / kPi;
            j["zeta_max_deg"] = *mx * 180.0 / kPi;
            j["zeta_start_deg"] = series.zeta.front() * 180.0 / kPi;
            j["zeta_end_deg"] = series.zeta.back() * 180.0 / kPi;
            j["samples"] = series.t.size();
            log.write("classification.json", dump(j));
        });

        guarded(OutputKind::frequencies, [&] {
            if (series.t.empty()) throw numerical_error("no usable samples");
            const double dt = (series.t.back() - series.t.front()) /
                              static_cast<double>(series.t.size() - 1);
            const Tone tone = naff_frequency(series.zeta, dt);
            ordered_json j;
            ordered_json z;
            z["frequency_rad_s"] = tone.frequency;
            if (tone.frequency > 0.0) {
                z["period_s"] = 2.0 * kPi / tone.frequency;
                z["period_yr"] = 2.0 * kPi / tone.frequency / kSecondsPerYear;
            } else {
                z["period_s"] = nullptr;
                z["period_yr"] = nullptr;
            }
            z["amplitude_deg"] = tone.amplitude * 180.0 / kPi;
            j["zeta"] = z;
            try {
                j["quasiperiodicity_index"] = quasiperiodicity_index(series);
            } catch (const std::exception& err) {
                j["quasiperiodicity_index"] = nullptr;
                j["quasiperiodicity_note"] = err.what();
            }
            log.write("frequencies.json", dump(j));
        });

        guarded(OutputKind::portrait, [&] {
            PortraitSpec spec;
            spec.zeta_lo = cfg.portrait_zeta_lo_deg * kPi / 180.0;
            spec.zeta_hi = cfg.portrait_zeta_hi_deg * kPi / 180.0;
            spec.n_zeta = cfg.portrait_n_zeta;
            spec.u_lo = cfg.portrait_u_lo;
            spec.u_hi = cfg.portrait_u_hi;
            spec.n_u = cfg.portrait_n_u;
            const PhasePortrait portrait = phase_portrait(mu, spec, copts, cfg.threads);
            log.write("portrait.json", dump(portrait_json(portrait, cfg.zeta_min_deg)));
        });
    } catch (const config_error& e) {
        status = "config_error";
        error_msg = e.what();
        outcome.exit_code = 2;
    } catch (const collision_error& e) {
        status = "collision";
        error_msg = e.what();
        outcome.exit_code = 3;
        partial = true;
    } catch (const numerical_error& e) {
        status = "numerical_error";
        error_msg = e.what();
        outcome.exit_code = 4;
        partial = true;
    } catch (const invalid_input& e) {
        status = "config_error";
        error_msg = e.what();
        outcome.exit_code = 2;
    }

    ordered_json manifest;
    manifest["status"] = status;
    manifest["exit_code"] = outcome.exit_code;
    manifest["partial"] = partial;
    if (!error_msg.empty()) manifest["error"] = error_msg;
    manifest["run"] = run_info;
    if (!skipped.empty()) manifest["skipped_outputs"] = skipped;
    manifest["files"] = log.entries;
    log.write("manifest.json", dump(manifest));

    outcome.files = log.names;
    return outcome;
}

RunOutcome run_equilibria(const ScenarioConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    FileLog log;
    log.out_dir = out_dir;

    RunOutcome outcome;
    std::string status = "ok";
    std::string error_msg;

    try {
        const std::array<double, 3> masses = {cfg.bodies[0].gm_km3s2, cfg.bodies[1].gm_km3s2,
                                              cfg.bodies[2].gm_km3s2};
        double separation = cfg.ref_radius_km;
        if (separation <= 0.0) {
            separation = Vec2(cfg.bodies[1].x_km - cfg.bodies[0].x_km,
                              cfg.bodies[1].y_km - cfg.bodies[0].y_km)
                             .norm();
        }
        if (separation <= 0.0) {
            throw config_error("equilibria need ref_radius_km or distinct central/moon1 positions");
        }

        ordered_json j;
        j["masses_km3s2"] = masses;
        j["separation_km"] = separation;
        const auto [stable, margin] = gascheau_stable(masses);
        ordered_json g;
        g["margin"] = margin;
        g["stable"] = stable;
        j["gascheau"] = g;

        // Collinear arrangements keyed by where moon2 sits; the triangular
        // pair closes the list.
        struct Item {
            EquilibriumKind kind;
            std::array<int, 3> order;
        };
        const Item items[3] = {
            {EquilibriumKind::euler_L1, {0, 2, 1}},
            {EquilibriumKind::euler_L2, {0, 1, 2}},
            {EquilibriumKind::euler_L3, {2, 0, 1}},
        };
        const char* names[5] = {"euler_L1", "euler_L2", "euler_L3", "lagrange_L4", "lagrange_L5"};

        ordered_json points = ordered_json::array();
        for (const Item& item : items) {
            const EquilibriumConfig eq = euler_collinear(masses, item.order, separation);
            ordered_json p;
            p["kind"] = names[static_cast<int>(eq.kind)];
            ordered_json pos = ordered_json::array();
            for (const Vec2& r : eq.positions) pos.push_back({r.x(), r.y()});
            p["positions_km"] = pos;
            p["angular_rate_rad_s"] = eq.angular_rate;
            p["period_s"] = 2.0 * kPi / eq.angular_rate;
            const double rate = euler_unstable_check(eq);
            p["growth_rate_per_s"] = rate;
            p["efold_time_s"] = 1.0 / rate;
            points.push_back(p);
        }
        for (EquilibriumKind kind : {EquilibriumKind::lagrange_L4, EquilibriumKind::lagrange_L5}) {
            const EquilibriumConfig eq = lagrange_equilateral(masses, separation, kind);
            ordered_json p;
            p["kind"] = names[static_cast<int>(eq.kind)];
            ordered_json pos = ordered_json::array();
            for (const Vec2& r : eq.positions) pos.push_back({r.x(), r.y()});
            p["positions_km"] = pos;
            p["angular_rate_rad_s"] = eq.angular_rate;
            p["period_s"] = 2.0 * kPi / eq.angular_rate;
            p["growth_rate_per_s"] = max_growth_rate(eq);
            points.push_back(p);
        }
        j["points"] = points;
        log.write("equilibria.json", dump(j));
    } catch (const config_error& e) {
        status = "config_error";
        error_msg = e.what();
        outcome.exit_code = 2;
    } catch (const invalid_input& e) {
        status = "config_error";
        error_msg = e.what();
        outcome.exit_code = 2;
    } catch (const numerical_error& e) {
        status = "numerical_error";
        error_msg = e.what();
        outcome.exit_code = 4;
    }

    ordered_json manifest;
    manifest["status"] = status;
    manifest["exit_code"] = outcome.exit_code;
    manifest["partial"] = false;
    if (!error_msg.empty()) manifest["error"] = error_msg;
    manifest["files"] = log.entries;
    log.write("manifest.json", dump(manifest));

    outcome.files = log.names;
    return outcome;
}

}  // namespace coorb
