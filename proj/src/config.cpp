#include "coorbit/config_cli.hpp"

#include <filesystem>
#include <fstream>

namespace coorbit {

void attach_config_options(CLI::App& app, RunConfig& config) {
    app.add_option("--algebra", config.algebra,
                   "su(2) | su(3) | su(4) | path to a structure table");
    app.add_option("--mu", config.mu, "functional coefficients");
    app.add_option("--z", config.z, "orbit element coordinates");
    app.add_option("--connection", config.connection,
                   "canonical | natural-torsion-free | levi-civita | "
                   "coadjoint-levi-civita | custom");
    app.add_option("--ell-file", config.ell_file, "custom connection tensor");
    app.add_option("--metric", config.metric, "kahler | killing");
    app.add_option("--character", config.character,
                   "character weight over the stabilizer basis");
    app.add_option("--orientation", config.orientation, "+1 or -1");
    app.add_option("--cutoff-two-j", config.cutoff_two_j,
                   "spin enumeration cutoff (2j)");
    app.add_option("--irreps", config.irreps,
                   "builtin:defining | builtin:adjoint | irrep file paths");
    app.add_option("--checks", config.checks, "check names to enable");
    app.add_option("--tolerance-scale", config.tolerance_scale,
                   "multiplies every tolerance");
    app.add_option("--seed", config.seed, "seed for randomized checks");
    app.add_option("--grid-periodic", config.grid_periodic,
                   "divergence grid points per periodic angle");
    app.add_option("--grid-theta", config.grid_theta,
                   "divergence grid points in the polar angle");
    app.add_option("--oracle-grid", config.oracle_grid,
                   "Galerkin oracle grid points per angle");
    app.add_option("--oracle-two-j", config.oracle_two_j,
                   "Galerkin oracle spin cutoff (2j)");
    app.add_option("--out", config.out_dir, "output directory");
}

RunConfig config_from_toml_text(const std::string& text) {
    const std::string tmp =
        (std::filesystem::temp_directory_path() /
         ("coorbit_cfg_" + std::to_string(std::hash<std::string>{}(text)) + ".toml"))
            .string();
    {
        std::ofstream out(tmp);
        out << text;
    }
    RunConfig config = config_from_toml_file(tmp);
    std::filesystem::remove(tmp);
    return config;
}

RunConfig config_from_toml_file(const std::string& path) {
    RunConfig config;
    CLI::App app{"coorbit config"};
    attach_config_options(app, config);
    app.set_config("--config")->required();
    try {
        std::vector<std::string> args = {"--config", path};
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("cannot parse ") + path + ": " + e.what());
    }
    return config;
}

}  // namespace coorbit
