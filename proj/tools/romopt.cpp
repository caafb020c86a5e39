#include "romopt/pipeline.hpp"

#include "romopt/io_util.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

using namespace romopt;

namespace {

SampleRange parse_range(const std::string& text) {
    const std::size_t dots = text.find("..");
    if (dots == std::string::npos) {
        const long k = parse_long(text, "--samples");
        return {static_cast<int>(k), static_cast<int>(k)};
    }
    const long a = parse_long(text.substr(0, dots), "--samples start");
    const long b = parse_long(text.substr(dots + 2), "--samples end");
    return {static_cast<int>(a), static_cast<int>(b)};
}

Vector parse_mu_list(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string item =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        values.push_back(parse_double(item, "--mu"));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    Vector mu(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        mu[static_cast<int>(i)] = values[i];
    }
    return mu;
}

struct CommonArgs {
    std::string config_path;
    std::string workspace;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("-c,--config", args.config_path, "study configuration file")->required();
    sub->add_option("-w,--workspace", args.workspace, "override the workspace directory");
}

StudyConfig load_for(const CommonArgs& args) {
    StudyConfig config = load_study_config(args.config_path);
    if (!args.workspace.empty()) {
        config.workspace = std::filesystem::absolute(args.workspace);
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced-order hull resistance studies: sampling, surrogate "
                 "construction, optimization, and database checks."};
    app.require_subcommand(1);

    CommonArgs args;
    std::string samples_text;
    std::string mu_text;
    long seed = -1;
    int jobs = 1;
    bool enrich = false;
    bool from_report = false;

    CLI::App* sample = app.add_subcommand("sample", "write the experiment plan (doe.json)");
    add_common(sample, args);
    sample->add_option("--seed", seed, "override the plan seed");

    CLI::App* offline = app.add_subcommand(
        "offline", "run the solver for every plan point and distill regime states");
    add_common(offline, args);
    offline->add_option("--samples", samples_text, "restrict to sample indices a..b");
    offline->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    offline->add_option("--seed", seed, "override the plan seed");

    CLI::App* build = app.add_subcommand("build-rom", "assemble rom.bin from the sample database");
    add_common(build, args);

    CLI::App* optimize =
        app.add_subcommand("optimize", "minimize the rom-predicted resistance over the bounds");
    add_common(optimize, args);
    optimize->add_option("--seed", seed, "override the optimizer seed");

    CLI::App* validate =
        app.add_subcommand("validate", "compare the rom against a fresh solver run");
    add_common(validate, args);
    validate->add_option("--mu", mu_text, "parameter point as comma-separated values");
    validate->add_flag("--from-report", from_report, "validate at the optimizer's best point");
    validate->add_flag("--enrich", enrich, "add the validated point to the database");

    CLI::App* check =
        app.add_subcommand("check", "verify every workspace artifact against the plan");
    add_common(check, args);

    CLI::App* spectrum =
        app.add_subcommand("spectrum", "export per-sample eigenvalue tables (spectrum.csv)");
    add_common(spectrum, args);
    spectrum->add_option("--samples", samples_text, "restrict to sample indices a..b");

    CLI::App* energy = app.add_subcommand("energy", "export the rom's modal energies (energy.csv)");
    add_common(energy, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::optional<SampleRange> range;
        if (!samples_text.empty()) {
            range = parse_range(samples_text);
        }

        if (sample->parsed()) {
            StudyConfig config = load_for(args);
            if (seed >= 0) {
                config.doe_seed = static_cast<std::uint64_t>(seed);
            }
            cmd_sample(config);
        } else if (offline->parsed()) {
            StudyConfig config = load_for(args);
            if (seed >= 0) {
                config.doe_seed = static_cast<std::uint64_t>(seed);
            }
            if (cmd_offline(config, range, jobs) != 0) {
                return 1;
            }
        } else if (build->parsed()) {
            cmd_build_rom(load_for(args));
        } else if (optimize->parsed()) {
            StudyConfig config = load_for(args);
            if (seed >= 0) {
                config.optimizer.seed = static_cast<std::uint64_t>(seed);
            }
            cmd_optimize(config);
        } else if (validate->parsed()) {
            const StudyConfig config = load_for(args);
            if (mu_text.empty() == !from_report) {
                throw ConfigError("validate needs exactly one of --mu or --from-report");
            }
            const Vector mu = from_report ? report_best_mu(config) : parse_mu_list(mu_text);
            cmd_validate(config, mu, enrich);
        } else if (check->parsed()) {
            const std::vector<std::string> problems = cmd_check(load_for(args));
            for (const std::string& problem : problems) {
                std::cout << problem << "\n";
            }
            if (!problems.empty()) {
                return 1;
            }
            std::cerr << "[check] workspace is consistent\n";
        } else if (spectrum->parsed()) {
            cmd_spectrum(load_for(args), range);
        } else if (energy->parsed()) {
            cmd_energy(load_for(args));
        }
    } catch (const ConfigError& e) {
        std::cerr << "romopt: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "romopt: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
