#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coorbit/su2.hpp"

namespace coorbit {

/// One batch run: algebra -> orbit -> connection -> spinors -> spectrum,
/// plus the verification battery.
struct RunConfig {
    std::string algebra = "su(2)";        // "su(n)" or a structure table path
    std::vector<double> mu;               // one of mu / z must be set
    std::vector<double> z;
    std::string connection = "coadjoint-levi-civita";
    std::string ell_file;                 // for connection = "custom"
    std::string metric = "kahler";        // or "killing"
    std::vector<double> character;        // weight over the k basis; empty = trivial
    int orientation = +1;
    int cutoff_two_j = 10;                // su(2) irrep enumeration cutoff
    std::vector<std::string> irreps;      // "builtin:defining" | "builtin:adjoint" | path
    std::vector<std::string> checks;      // empty = full battery
    double tolerance_scale = 1.0;
    unsigned seed = 20240901;
    int grid_periodic = 64;
    int grid_theta = 64;
    int oracle_grid = 48;
    int oracle_two_j = 6;
    std::string out_dir;

    void validate() const;  // throws ConfigError
};

struct CheckResult {
    std::string name;
    std::string description;
    double defect = 0.0;
    double tolerance = 0.0;
    bool enabled = true;
    bool passed = true;   // disabled checks report passed = true, enabled = false
    std::string note;
};

struct PropertyReport {
    std::vector<CheckResult> checks;
    std::string metadata_json;  // orbit/config echo, serialized separately

    bool all_passed() const;
    const CheckResult* find(const std::string& name) const;
};

struct RunResult {
    PropertyReport report;
    std::optional<SpectrumResult> spectrum;
    std::string report_json;
    std::string spectrum_csv;
};

/// Instantiated pipeline stages for one configuration.  Constructed on the
/// heap once; `ctx` points into the owning object.
struct Pipeline {
    RunConfig config;
    std::unique_ptr<LieAlgebra> algebra;
    OrbitDatum datum;
    OrbitGeometry geom;
    WeightData weights;
    MatrixXd g0;
    std::unique_ptr<FockSpace> fock;
    ConnectionMap conn;
    BlockContext ctx;
    std::vector<IrrepData> irreps;
};

std::unique_ptr<Pipeline> build_pipeline(const RunConfig& config);

// The verification battery for one configuration (stages 1-7 and 9 of the
// battery; quadrature checks run under `run_oracle`).
RunResult run_verify(const RunConfig& config);
// Battery plus blockwise spectrum and CSV.
RunResult run_spectrum(const RunConfig& config);
// su(2)-only quadrature cross-checks (divergence + Galerkin eigenvalues).
RunResult run_oracle(const RunConfig& config);

// Writes report (and spectrum when present) under config.out_dir; returns
// process exit code (0 iff all enabled checks passed).
int write_outputs(const RunConfig& config, const RunResult& result);

// TOML subset loader for RunConfig (top-level key = value pairs).
RunConfig config_from_toml_file(const std::string& path);
RunConfig config_from_toml_text(const std::string& text);

}  // namespace coorbit
