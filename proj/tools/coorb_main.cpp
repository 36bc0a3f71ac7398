#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "coorb/errors.hpp"
#include "coorb/scenario.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string preset;
    std::string out_dir = "out";
    std::string format;
    std::string presets_dir;
    std::uint64_t seed = 0;
    int threads = 0;
};

void add_common_options(CLI::App* sub, CliArgs& args) {
    sub->add_option("--config", args.config_path, "Scenario config file (flat INI-style)");
    sub->add_option("--preset", args.preset,
                    "Preset name; shorthand for a config containing only 'preset = <name>'");
    sub->add_option("--out", args.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", args.seed, "Seed for the velocity-perturbation RNG");
    sub->add_option("--format", args.format, "Table output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", args.threads, "Worker threads for the portrait grid")
        ->check(CLI::Range(1, 256));
    sub->add_option("--presets-dir", args.presets_dir, "Directory to resolve preset names in");
}

std::string read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw coorb::config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coorb: planar co-orbital three-body toolkit"};
    app.require_subcommand(1);

    CliArgs args;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Propagate the configured system and write the requested outputs");
    CLI::App* portrait = app.add_subcommand(
        "portrait", "Regime map of the averaged co-orbital model for the configured mass ratio");
    CLI::App* classify =
        app.add_subcommand("classify", "Propagate and classify the co-orbital regime");
    CLI::App* equilibria = app.add_subcommand(
        "equilibria", "Lagrange/Euler equilibrium survey for the configured masses");
    CLI::App* frequencies = app.add_subcommand(
        "frequencies", "Libration frequency and quasi-periodicity of the resonant angle");
    for (CLI::App* sub : {simulate, portrait, classify, equilibria, frequencies}) {
        add_common_options(sub, args);
    }

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();

    try {
        std::string text;
        if (!args.config_path.empty()) text = read_config_file(args.config_path);
        if (!args.preset.empty()) {
            text = "[scenario]\npreset = " + args.preset + "\n" + text;
        }

        coorb::ScenarioConfig cfg = coorb::parse_config(text, args.presets_dir);
        if (sub->count("--seed") > 0) cfg.seed = args.seed;
        if (sub->count("--format") > 0) cfg.format = args.format;
        if (sub->count("--threads") > 0) cfg.threads = args.threads;

        if (sub == portrait) cfg.outputs = {coorb::OutputKind::portrait};
        else if (sub == classify) cfg.outputs = {coorb::OutputKind::classification};
        else if (sub == frequencies) cfg.outputs = {coorb::OutputKind::frequencies};

        const coorb::RunOutcome outcome = sub == equilibria
                                              ? coorb::run_equilibria(cfg, args.out_dir)
                                              : coorb::run_scenario(cfg, args.out_dir);
        for (const std::string& name : outcome.files) {
            std::cout << "wrote " << args.out_dir << "/" << name << "\n";
        }
        if (outcome.exit_code != 0) {
            std::cerr << "run did not complete cleanly (exit " << outcome.exit_code
                      << "); see manifest.json\n";
        }
        return outcome.exit_code;
    } catch (const coorb::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const coorb::invalid_input& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const coorb::collision_error& e) {
        std::cerr << "collision: " << e.what() << "\n";
        return 3;
    } catch (const coorb::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
