#include "romopt/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

using namespace romopt;

int main(int argc, char** argv) {
    CLI::App app{"Scaffold a self-contained bow-bulb demo study: synthetic hull, "
                 "lattice parameterization, and a ready-to-run configuration."};

    std::string dir;
    DemoStudyOptions options;
    app.add_option("dir", dir, "directory to create the study in")->required();
    app.add_option("--hull-level", options.hull_level, "hull refinement level")
        ->check(CLI::PositiveNumber);
    app.add_option("--half-width", options.half_width, "parameter bound half-width");
    app.add_option("--doe-interior", options.doe_interior, "interior plan points");
    app.add_option("--doe-seed", options.doe_seed, "plan seed");
    app.add_option("--optimizer-seed", options.optimizer_seed, "optimizer seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const std::filesystem::path config = scaffold_demo_study(dir, options);
        std::cout << config.string() << "\n";
    } catch (const ConfigError& e) {
        std::cerr << "romopt-mkstudy: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "romopt-mkstudy: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
