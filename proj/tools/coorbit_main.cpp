#include <cstdio>
#include <exception>

#include "coorbit/config_cli.hpp"

namespace {

void print_report(const coorbit::RunResult& result) {
    for (const auto& check : result.report.checks) {
        const char* tag = !check.enabled ? "SKIP" : check.passed ? "PASS" : "FAIL";
        std::printf("[%s] %-32s defect=%.3e tol=%.3e%s%s\n", tag,
                    check.name.c_str(), check.defect, check.tolerance,
                    check.note.empty() ? "" : "  ", check.note.c_str());
    }
    if (result.spectrum) {
        std::printf("spectrum: %zu eigenvalue rows", result.spectrum->rows.size());
        if (result.spectrum->non_hermitian)
            std::printf("  (warning: non-Hermitian blocks, complex pairs reported)");
        if (result.spectrum->empty_warning)
            std::printf("  (warning: every invariant subspace is empty)");
        std::printf("\n");
    }
}

int run_mode(const coorbit::RunConfig& config,
             coorbit::RunResult (*runner)(const coorbit::RunConfig&)) {
    const coorbit::RunResult result = runner(config);
    print_report(result);
    const int code = coorbit::write_outputs(config, result);
    std::printf("%s\n", code == 0 ? "all enabled checks passed"
                                  : "FAILURES above tolerance");
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coadjoint-orbit Dirac spectra and verification battery"};
    app.require_subcommand(1);

    coorbit::RunConfig config;

    auto* verify = app.add_subcommand("verify", "run the property battery");
    auto* spectrum =
        app.add_subcommand("spectrum", "full pipeline with spectrum output");
    auto* oracle = app.add_subcommand(
        "oracle", "quadrature cross-checks (su(2) structure tables only)");
    for (auto* sub : {verify, spectrum, oracle}) {
        coorbit::attach_config_options(*sub, config);
        sub->set_config("--config");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return run_mode(config, coorbit::run_verify);
        if (spectrum->parsed()) return run_mode(config, coorbit::run_spectrum);
        return run_mode(config, coorbit::run_oracle);
    } catch (const coorbit::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
