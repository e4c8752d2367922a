#include "coorbit/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "json.hpp"

namespace coorbit {

namespace {

using nlohmann::json;

bool is_eps_su2(const LieAlgebra& g) {
    if (g.dim() != 3) return false;
    try {
        Su2Realization su2(g);
        return true;
    } catch (const UnsupportedAlgebra&) {
        return false;
    }
}

VectorXd to_vec(const std::vector<double>& v) {
    return Eigen::Map<const VectorXd>(v.data(), v.size());
}

std::vector<double> from_vec(const VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

// Gaussian vector with a deterministic stream.
VectorXd randn(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> dist;
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
}

MatrixXd randn_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> dist;
    MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

}  // namespace

void RunConfig::validate() const {
    if (metric != "kahler" && metric != "killing")
        throw ConfigError("metric must be \"kahler\" or \"killing\"");
    if (metric == "killing" && connection != "canonical" && connection != "custom")
        throw ConfigError(
            "metric = \"killing\" supports only connection = \"canonical\" or "
            "\"custom\"; the Kahler Levi-Civita forms need the orbit metric");
    const std::set<std::string> labels{"canonical", "natural-torsion-free",
                                       "levi-civita", "coadjoint-levi-civita",
                                       "custom"};
    if (!labels.count(connection))
        throw ConfigError("unknown connection label \"" + connection + "\"");
    if (connection == "custom" && ell_file.empty())
        throw ConfigError("connection = \"custom\" requires ell_file");
    if (orientation != 1 && orientation != -1)
        throw ConfigError("orientation must be +1 or -1");
    if (!mu.empty() && !z.empty())
        throw ConfigError("give either mu or z, not both");
    if (mu.empty() && z.empty())
        throw ConfigError("one of mu or z is required");
    if (cutoff_two_j < 0) throw ConfigError("cutoff must be nonnegative");
    if (tolerance_scale <= 0.0) throw ConfigError("tolerance scale must be positive");
}

std::unique_ptr<Pipeline> build_pipeline(const RunConfig& config) {
    config.validate();
    auto p = std::make_unique<Pipeline>();
    p->config = config;

    if (config.algebra == "su(2)")
        p->algebra = std::make_unique<LieAlgebra>(LieAlgebra::su(2));
    else if (config.algebra == "su(3)")
        p->algebra = std::make_unique<LieAlgebra>(LieAlgebra::su(3));
    else if (config.algebra == "su(4)")
        p->algebra = std::make_unique<LieAlgebra>(LieAlgebra::su(4));
    else
        p->algebra = std::make_unique<LieAlgebra>(
            LieAlgebra::from_json_file(config.algebra));

    const LieAlgebra& g = *p->algebra;
    p->datum = config.mu.empty() ? datum_from_z(g, to_vec(config.z))
                                 : solve_z(g, to_vec(config.mu));
    p->geom = kahler_structure(g, p->datum);
    p->weights = weight_decomposition(p->geom);
    p->g0 = p->geom.metric_gram(config.metric);
    p->fock = std::make_unique<FockSpace>(
        complex_model(p->g0, p->geom.J, p->weights.ordered_basis));

    if (config.connection == "custom")
        p->conn = connection_from_json_file(config.ell_file, p->geom.r());
    else
        p->conn = full_connection(config.connection, p->geom, p->weights);

    CharacterData character;
    character.weight = to_vec(config.character);
    p->ctx = make_block_context(p->geom, p->weights, *p->fock, p->conn, p->g0,
                                character, config.orientation);

    for (const auto& spec : config.irreps) {
        if (spec == "builtin:adjoint")
            p->irreps.push_back(adjoint_irrep(g));
        else if (spec == "builtin:defining")
            p->irreps.push_back(sun_defining_irrep(g));
        else
            p->irreps.push_back(irrep_from_json_file(g, spec));
    }
    if (p->irreps.empty()) {
        if (is_eps_su2(g)) {
            for (int two_j = 0; two_j <= config.cutoff_two_j; ++two_j)
                p->irreps.push_back(su2_irrep(g, two_j));
        } else {
            if (!g.defining_matrices().empty())
                p->irreps.push_back(sun_defining_irrep(g));
            p->irreps.push_back(adjoint_irrep(g));
        }
    }
    return p;
}

namespace {

// ---------------------------------------------------------------------------
// battery checks

CheckResult check_kahler_suite(const Pipeline& p, double tol_scale) {
    const OrbitGeometry& geom = p.geom;
    const WeightData& w = p.weights;
    const int r = geom.r();
    const MatrixXd id = MatrixXd::Identity(r, r);
    double defect = (geom.J * geom.J + id).cwiseAbs().maxCoeff();

    std::mt19937_64 rng(p.config.seed);
    std::uniform_real_distribution<double> tdist(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const VectorXd z = geom.k_sub.basis * randn(rng, geom.k_sub.rank());
        const double t = tdist(rng);
        const MatrixXd rm = geom.m_sub.basis.transpose() * geom.algebra->kil() *
                            geom.algebra->ad_exp(z, t) * geom.m_sub.basis;
        defect = std::max(defect, (rm.transpose() * geom.omega * rm - geom.omega)
                                      .cwiseAbs()
                                      .maxCoeff());
        defect = std::max(defect, (rm * geom.J - geom.J * rm).cwiseAbs().maxCoeff());
        defect = std::max(defect, (rm.transpose() * geom.g_metric * rm - geom.g_metric)
                                      .cwiseAbs()
                                      .maxCoeff());
    }

    MatrixXd recon = MatrixXd::Zero(r, r);
    for (int i = 0; i < w.count(); ++i) recon += w.weights[i] * w.projectors[i];
    defect = std::max(defect, (recon - geom.gamma_abs).cwiseAbs().maxCoeff());
    for (int i = 0; i < w.count(); ++i)
        defect = std::max(defect, ((geom.g_metric - w.weights[i] * id) *
                                   w.projectors[i])
                                      .cwiseAbs()
                                      .maxCoeff());
    // Kirillov form against mu on random pairs, and nondegeneracy.
    for (int trial = 0; trial < 10; ++trial) {
        const VectorXd x = randn(rng, r), y = randn(rng, r);
        const double lhs = x.dot(geom.omega * y);
        const double rhs = p.datum.mu.dot(geom.gbracket(x, y));
        defect = std::max(defect, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }

    CheckResult res;
    res.name = "kahler_structure_suite";
    res.description =
        "complex structure squares to -I; omega/J/g invariant under the "
        "stabilizer action; spectral reconstruction of |Gamma|; metric is "
        "weight * kil on each weight space";
    res.defect = defect;
    res.tolerance = 1e-8 * tol_scale;
    res.passed = defect <= res.tolerance;
    return res;
}

CheckResult check_triple_oracle(const Pipeline& p, double tol_scale) {
    const OrbitGeometry& geom = p.geom;
    const ConnectionMap c1 = coadjoint_connection(geom, p.weights);
    const ConnectionMap c2 = levi_civita_connection(geom, geom.gamma_abs);
    const ConnectionMap c3 = koszul_connection(geom, geom.g_metric);
    double defect = 0.0;
    for (int a = 0; a < geom.r(); ++a) {
        defect = std::max(defect, (c1.ell[a] - c2.ell[a]).cwiseAbs().maxCoeff());
        defect = std::max(defect, (c2.ell[a] - c3.ell[a]).cwiseAbs().maxCoeff());
        defect = std::max(defect, (c1.ell[a] - c3.ell[a]).cwiseAbs().maxCoeff());
    }
    defect = std::max(defect, torsion(geom, c1).max_norm());
    defect = std::max(defect, c1.compatibility_defect(geom.g_metric));
    defect = std::max(defect, c1.j_commutation_defect(geom.J));

    CheckResult res;
    res.name = "levi_civita_triple_oracle";
    res.description =
        "weight formula, S-formula and dense Koszul solve agree as tensors; "
        "torsion vanishes; metric compatibility; J commutes with the "
        "connection";
    res.defect = defect;
    res.tolerance = 1e-9 * tol_scale;
    res.passed = defect <= res.tolerance;
    return res;
}

CheckResult check_bracket_battery(const Pipeline& p, double tol_scale) {
    const WeightData& w = p.weights;
    std::mt19937_64 rng(p.config.seed + 1);
    double defect = 0.0;
    int done = 0;
    while (done < 50) {
        for (int ai = 0; ai < w.count() && done < 50; ++ai) {
            for (int bi = 0; bi < w.count() && done < 50; ++bi) {
                VectorXd x = w.projectors[ai] * randn(rng, p.geom.r());
                VectorXd y = w.projectors[bi] * randn(rng, p.geom.r());
                if (x.norm() < 1e-12 || y.norm() < 1e-12) continue;
                x.normalize();
                y.normalize();
                const auto rep =
                    bracket_decomposition_check(p.geom, w, ai, x, bi, y);
                defect = std::max(defect, rep.max_defect);
                ++done;
            }
        }
    }
    CheckResult res;
    res.name = "weight_bracket_decomposition";
    res.description =
        "membership and J-intertwining identities of the weight-space "
        "decomposition of brackets, 50 random single-weight pairs";
    res.defect = defect;
    res.tolerance = 1e-9 * tol_scale;
    res.passed = defect <= res.tolerance;
    return res;
}

double clifford_suite_defect(const FockSpace& fock, unsigned seed) {
    const ComplexModel& model = fock.model();
    const int r = static_cast<int>(model.g0.rows());
    std::mt19937_64 rng(seed);
    double defect = 0.0;
    const MatrixXcd id = MatrixXcd::Identity(fock.dim(), fock.dim());

    // Clifford relation and creation/annihilation anticommutators.
    for (int trial = 0; trial < 10; ++trial) {
        const VectorXd x = randn(rng, r), y = randn(rng, r);
        const MatrixXcd kx = fock.kappa(x), ky = fock.kappa(y);
        defect = std::max(defect, (kx * ky + ky * kx +
                                   2.0 * x.dot(model.g0 * y) * id)
                                      .cwiseAbs()
                                      .maxCoeff());
        const MatrixXcd ax = fock.annihilate(x), cy = fock.create(y);
        defect = std::max(defect,
                          (ax * cy + cy * ax - model.herm_j(x, y) * id)
                              .cwiseAbs()
                              .maxCoeff());
        defect = std::max(defect, (ax * fock.annihilate(y) +
                                   fock.annihilate(y) * ax)
                                      .cwiseAbs()
                                      .maxCoeff());
        defect = std::max(defect, (fock.create(x) - fock.annihilate(x).adjoint())
                                      .cwiseAbs()
                                      .maxCoeff());
    }

    // Involution on random words of length <= 4: kappa(c)* = kappa(c*), with
    // X* = -X on generators (so the reversed word gains (-1)^length).
    for (int trial = 0; trial < 10; ++trial) {
        const int len = 1 + static_cast<int>(rng() % 4);
        std::vector<VectorXd> word;
        for (int i = 0; i < len; ++i) word.push_back(randn(rng, r));
        MatrixXcd fwd = id, rev = id;
        for (int i = 0; i < len; ++i) fwd = fwd * fock.kappa(word[i]);
        for (int i = len - 1; i >= 0; --i) rev = rev * fock.kappa(word[i]);
        const double sign = (len % 2 == 0) ? 1.0 : -1.0;
        defect = std::max(defect, (fwd.adjoint() - sign * rev).cwiseAbs().maxCoeff());
    }

    // Bogoliubov equivariance for 10 random unitaries of m_J.
    for (int trial = 0; trial < 10; ++trial) {
        MatrixXd t = randn_matrix(rng, r, r);
        t = 0.5 * (t - model.J * t * model.J);                // complex-linear
        const MatrixXd a = orthonormal_frame(model.g0);
        const MatrixXd skew =
            0.5 * (t - model.g0.inverse() * t.transpose() * model.g0);
        const MatrixXd u = expm(MatrixXd(skew));
        const MatrixXcd rho = fock.lift_unitary(u);
        defect = std::max(defect, (rho * rho.adjoint() - id).cwiseAbs().maxCoeff());
        for (int k = 0; k < 3; ++k) {
            const VectorXd x = randn(rng, r);
            defect = std::max(defect, (rho * fock.kappa(x) * rho.adjoint() -
                                       fock.kappa(VectorXd(u * x)))
                                          .cwiseAbs()
                                          .maxCoeff());
        }
        (void)a;
    }

    // Derivation (Leibniz) compatibility for 10 random skew maps.
    for (int trial = 0; trial < 10; ++trial) {
        MatrixXd t = randn_matrix(rng, r, r);
        t = 0.5 * (t - model.J * t * model.J);
        const MatrixXd skew =
            0.5 * (t - model.g0.inverse() * t.transpose() * model.g0);
        const MatrixXcd sig = fock.lift_skew(skew);
        defect = std::max(defect, (sig + sig.adjoint()).cwiseAbs().maxCoeff());
        for (int k = 0; k < 3; ++k) {
            const VectorXd x = randn(rng, r);
            defect = std::max(defect, (sig * fock.kappa(x) - fock.kappa(x) * sig -
                                       fock.kappa(VectorXd(skew * x)))
                                          .cwiseAbs()
                                          .maxCoeff());
        }
    }

    // Chirality: involution, self-adjointness, anticommutation with kappa,
    // invariance under lifts, orientation flip, and independence of the
    // oriented orthonormal basis.
    const MatrixXcd gamma = fock.chirality(+1);
    defect = std::max(defect, (gamma * gamma - id).cwiseAbs().maxCoeff());
    defect = std::max(defect, (gamma - gamma.adjoint()).cwiseAbs().maxCoeff());
    defect = std::max(defect, (gamma + fock.chirality(-1)).cwiseAbs().maxCoeff());
    for (int trial = 0; trial < 5; ++trial) {
        const VectorXd x = randn(rng, r);
        defect = std::max(defect, (gamma * fock.kappa(x) + fock.kappa(x) * gamma)
                                      .cwiseAbs()
                                      .maxCoeff());
    }
    {
        // Interleaved J-adapted basis, rotated by a random special orthogonal
        // map for g0; the product formula must give the same operator.
        const int n = fock.n();
        MatrixXd oriented(r, 2 * n);
        for (int k = 0; k < n; ++k) {
            oriented.col(2 * k) = model.basis.col(k);
            oriented.col(2 * k + 1) = model.J * model.basis.col(k);
        }
        for (int trial = 0; trial < 3; ++trial) {
            MatrixXd skew = randn_matrix(rng, r, r);
            skew = 0.5 * (skew - skew.transpose());
            const MatrixXd q = expm(skew);  // SO(r), acts on coordinates
            const MatrixXd rotated = oriented * q;
            MatrixXcd prod = MatrixXcd::Identity(fock.dim(), fock.dim());
            for (int c = 0; c < r; ++c) prod = prod * fock.kappa(rotated.col(c));
            prod *= std::pow(std::complex<double>(0.0, 1.0), n);
            defect = std::max(defect, (prod - gamma).cwiseAbs().maxCoeff());
        }
        for (int trial = 0; trial < 3; ++trial) {
            MatrixXd t = randn_matrix(rng, r, r);
            t = 0.5 * (t - model.J * t * model.J);
            const MatrixXd skew =
                0.5 * (t - model.g0.inverse() * t.transpose() * model.g0);
            const MatrixXcd rho = fock.lift_unitary(expm(MatrixXd(skew)));
            defect = std::max(defect, (rho * gamma - gamma * rho).cwiseAbs().maxCoeff());
        }
    }
    return defect;
}

CheckResult check_clifford_suite(const Pipeline& p, double tol_scale) {
    CheckResult res;
    res.name = "clifford_fock_suite";
    res.description =
        "Clifford relations, involution, unitary/derivation lift "
        "compatibility, chirality properties on the orbit Fock space";
    res.defect = clifford_suite_defect(*p.fock, p.config.seed + 2);
    res.tolerance = 1e-10 * tol_scale;
    res.passed = res.defect <= res.tolerance;
    return res;
}

struct BlockMeasurements {
    bool blocks_valid = true;
    double trace_norm = 0.0;
    double max_hermiticity = 0.0;
    double max_chirality_anticomm = 0.0;
    double negation_defect = 0.0;
    double modified_hermiticity = 0.0;
    double modified_identity = 0.0;
    bool any_nonempty = false;
    std::optional<SpectrumResult> spec;
};

// Hermiticity and chirality data for the configured connection.  When the
// connection is not K-equivariant the section-space blocks do not exist
// (SubspaceNotPreserved); measurements then use the per-irrep function-space
// matrices, on which the operator is defined for any tensor.
BlockMeasurements measure_blocks(const Pipeline& p, bool want_spectrum) {
    BlockMeasurements out;
    out.trace_norm = trace_criterion(p.geom, p.conn, p.g0).norm();
    try {
        SpectrumResult spec = spectrum(p.ctx, p.irreps);
        for (const auto& block : spec.blocks) {
            if (block.size() == 0) continue;
            out.any_nonempty = true;
            out.max_hermiticity = std::max(out.max_hermiticity, block.hermiticity_defect);
            out.max_chirality_anticomm =
                std::max(out.max_chirality_anticomm, block.chirality_anticommutator);
        }
        out.negation_defect = spec.negation_symmetry_defect();
        for (const auto& irrep : p.irreps) {
            const DiracBlock mod = modified_dirac(p.ctx, irrep);
            if (mod.size() == 0) continue;
            out.modified_hermiticity =
                std::max(out.modified_hermiticity, mod.hermiticity_defect);
            const DiracBlock plain = block_operator(p.ctx, irrep);
            const MatrixXcd m = plain.inv_basis.adjoint() *
                                big_m_matrix(p.ctx, irrep) * plain.inv_basis;
            const double lhs = (mod.d_matrix - plain.d_matrix).norm();
            const double rhs = (0.5 * (m - m.adjoint())).norm();
            out.modified_identity =
                std::max(out.modified_identity, std::abs(lhs - rhs));
        }
        if (want_spectrum) out.spec = std::move(spec);
    } catch (const SubspaceNotPreserved&) {
        out.blocks_valid = false;
        for (const auto& irrep : p.irreps) {
            const MatrixXcd big = big_dirac_matrix(p.ctx, irrep);
            const MatrixXcd big_m = big_m_matrix(p.ctx, irrep);
            out.any_nonempty = true;
            out.max_hermiticity = std::max(
                out.max_hermiticity, (big - big.adjoint()).cwiseAbs().maxCoeff());
            const MatrixXcd gamma_big = Eigen::kroneckerProduct(
                MatrixXcd::Identity(irrep.dim, irrep.dim),
                p.fock->chirality(p.ctx.orientation)).eval();
            out.max_chirality_anticomm =
                std::max(out.max_chirality_anticomm,
                         (gamma_big * big + big * gamma_big).cwiseAbs().maxCoeff());
            const MatrixXcd mod = big - 0.5 * (big_m - big_m.adjoint());
            out.modified_hermiticity = std::max(
                out.modified_hermiticity, (mod - mod.adjoint()).cwiseAbs().maxCoeff());
            const double lhs = (mod - big).norm();
            const double rhs = (0.5 * (big_m - big_m.adjoint())).norm();
            out.modified_identity =
                std::max(out.modified_identity, std::abs(lhs - rhs));
        }
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}

}  // namespace

bool PropertyReport::all_passed() const {
    for (const auto& c : checks)
        if (c.enabled && !c.passed) return false;
    return true;
}

const CheckResult* PropertyReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

json metadata_json(const Pipeline& p) {
    json meta;
    meta["algebra"] = p.config.algebra;
    meta["algebra_dim"] = p.algebra->dim();
    meta["mu"] = from_vec(p.datum.mu);
    meta["z"] = from_vec(p.datum.z);
    meta["dim_k"] = p.geom.k_sub.rank();
    meta["dim_m"] = p.geom.r();
    meta["weights"] = p.weights.weights;
    meta["weight_dims"] = p.weights.subspace_dims;
    meta["metric"] = p.config.metric;
    meta["connection"] = p.conn.label;
    meta["character"] = from_vec(p.ctx.character.weight);
    meta["orientation"] = p.ctx.orientation;
    meta["fock_dim"] = p.fock->dim();
    meta["cutoff_two_j"] = p.config.cutoff_two_j;
    meta["seed"] = p.config.seed;
    meta["tolerance_scale"] = p.config.tolerance_scale;
    std::vector<std::string> labels;
    for (const auto& irrep : p.irreps) labels.push_back(irrep.label);
    meta["irreps"] = labels;
    std::vector<std::vector<double>> kb;
    for (int c = 0; c < p.geom.k_sub.rank(); ++c)
        kb.push_back(from_vec(p.geom.k_sub.basis.col(c)));
    meta["k_basis"] = kb;
    return meta;
}

bool enabled_by_config(const RunConfig& config, const std::string& name) {
    if (config.checks.empty()) return true;
    for (const auto& c : config.checks)
        if (c == "all" || c == name) return true;
    return false;
}

CheckResult disabled_check(const std::string& name, const std::string& why) {
    CheckResult res;
    res.name = name;
    res.description = why;
    res.enabled = false;
    res.passed = true;
    res.note = why;
    return res;
}

// Battery stages 1-7 and 9.  The quadrature stage (8) runs in run_oracle and
// is reported as disabled here so that every acceptance check appears exactly
// once per report.
PropertyReport run_battery(const Pipeline& p, bool oracle_stage) {
    const RunConfig& config = p.config;
    const double ts = config.tolerance_scale;
    PropertyReport report;
    auto add = [&](CheckResult res) {
        if (!enabled_by_config(config, res.name)) {
            res.enabled = false;
            res.passed = true;
            res.note = "disabled by configuration";
        }
        report.checks.push_back(std::move(res));
    };

    if (!oracle_stage) {
        add(check_kahler_suite(p, ts));
        add(check_triple_oracle(p, ts));
        add(check_bracket_battery(p, ts));
        add(check_clifford_suite(p, ts));

        const BlockMeasurements blocks = measure_blocks(p, false);

        {
            CheckResult res;
            res.name = "connection_trace_criterion";
            res.description =
                "torsion-trace vector of the configured connection (zero iff "
                "its Dirac operator is formally self-adjoint)";
            res.defect = blocks.trace_norm;
            res.tolerance = 1e-9 * ts;
            res.passed = res.defect <= res.tolerance;
            add(std::move(res));
        }
        {
            const FrameSumReport frame = frame_sum_check(p.geom, p.conn, p.g0);
            CheckResult res;
            res.name = "frame_sum_criterion";
            res.description =
                "frame sum of the connection tensor and its fundamental-field "
                "biframe form agree; zero iff formally self-adjoint";
            res.defect = frame.agreement_defect;
            res.tolerance = 1e-10 * ts;
            res.passed = res.defect <= res.tolerance &&
                         (frame.norm <= 1e-9 * ts) ==
                             (blocks.trace_norm <= 1e-9 * ts);
            res.note = "frame_sum_norm=" + format_double(frame.norm);
            add(std::move(res));
        }
        {
            CheckResult res;
            res.name = "connection_metric_compatibility";
            res.description = "skewness of ell(X, .) for the configured metric";
            res.defect = p.conn.compatibility_defect(p.g0);
            res.tolerance = 1e-9 * ts;
            if (p.conn.label == "custom") {
                res.passed = true;
                res.note = res.defect > res.tolerance
                               ? "warning: custom map is not metric-compatible"
                               : "";
            } else if (p.conn.label == "canonical") {
                res.passed = res.defect <= res.tolerance;  // zero tensor
            } else {
                res.passed = res.defect <= res.tolerance;
            }
            add(std::move(res));
        }
        {
            CheckResult res;
            res.name = "dirac_block_hermiticity";
            res.description =
                "Hermiticity defect of the Dirac matrices for the configured "
                "connection";
            res.defect = blocks.max_hermiticity;
            res.tolerance = 1e-8 * ts;
            res.passed = res.defect <= res.tolerance;
            if (!blocks.blocks_valid)
                res.note =
                    "connection is not K-equivariant; measured on per-irrep "
                    "function-space matrices";
            add(std::move(res));
        }
        {
            CheckResult res;
            res.name = "dirac_selfadjoint_trace_iff";
            res.description =
                "Hermiticity of the Dirac matrices holds exactly when the "
                "trace criterion vanishes";
            const bool trace_zero = blocks.trace_norm <= 1e-9 * ts;
            const bool herm = blocks.max_hermiticity <= 1e-8 * ts;
            res.defect = (trace_zero == herm) ? 0.0 : 1.0;
            res.tolerance = 0.5;
            res.passed = trace_zero == herm;
            res.note = "trace_norm=" + format_double(blocks.trace_norm) +
                       " max_hermiticity=" + format_double(blocks.max_hermiticity);
            add(std::move(res));
        }
        {
            CheckResult res;
            res.name = "dirac_chirality_symmetry";
            res.description =
                "Dirac matrices anticommute with the chirality operator; "
                "Hermitian spectra are symmetric under negation";
            res.defect = std::max(blocks.max_chirality_anticomm,
                                  blocks.blocks_valid &&
                                          blocks.max_hermiticity <= 1e-8 * ts
                                      ? blocks.negation_defect
                                      : 0.0);
            res.tolerance = 1e-8 * ts;
            res.passed = res.defect <= res.tolerance;
            add(std::move(res));
        }
        {
            CheckResult res;
            res.name = "modified_dirac_hermitian";
            res.description =
                "the modified operator D - (M - M*)/2 is Hermitian for every "
                "connection and differs from D by (M - M*)/2";
            res.defect = std::max(blocks.modified_hermiticity,
                                  blocks.modified_identity);
            res.tolerance = 1e-8 * ts;
            res.passed = res.defect <= res.tolerance;
            add(std::move(res));
        }
        // Metric scaling: rescaling z scales every eigenvalue by c^{-1/2}.
        if (is_eps_su2(*p.algebra) && p.config.connection != "custom") {
            CheckResult res;
            res.name = "metric_scaling_law";
            res.description =
                "replacing z by c z rescales every Dirac eigenvalue by "
                "c^{-1/2} (c = 2, 3, 5)";
            std::vector<double> base;
            {
                const SpectrumResult spec = spectrum(p.ctx, p.irreps);
                for (const auto& row : spec.rows)
                    for (int i = 0; i < row.multiplicity; ++i)
                        base.push_back(row.eigenvalue_re);
                std::sort(base.begin(), base.end());
            }
            double defect = 0.0;
            for (double c : {2.0, 3.0, 5.0}) {
                RunConfig scaled = p.config;
                scaled.mu.clear();
                scaled.z = from_vec((c * p.datum.z).eval());
                scaled.checks = {"none"};
                const auto sp = build_pipeline(scaled);
                const SpectrumResult spec = spectrum(sp->ctx, sp->irreps);
                std::vector<double> flat;
                for (const auto& row : spec.rows)
                    for (int i = 0; i < row.multiplicity; ++i)
                        flat.push_back(row.eigenvalue_re);
                std::sort(flat.begin(), flat.end());
                if (flat.size() != base.size()) {
                    defect = 1.0;
                    break;
                }
                for (size_t i = 0; i < flat.size(); ++i)
                    defect = std::max(defect,
                                      std::abs(flat[i] * std::sqrt(c) - base[i]) /
                                          std::max(1.0, std::abs(base[i])));
            }
            res.defect = defect;
            res.tolerance = 1e-8 * ts;
            res.passed = defect <= res.tolerance;
            add(std::move(res));
        } else {
            add(disabled_check("metric_scaling_law",
                               "requires a built-in enumerable su(2) orbit"));
        }
        add(disabled_check("su2_quadrature_oracles",
                           "runs under the oracle subcommand"));
    } else {
        for (const char* name :
             {"kahler_structure_suite", "levi_civita_triple_oracle",
              "weight_bracket_decomposition", "clifford_fock_suite",
              "connection_trace_criterion", "frame_sum_criterion",
              "connection_metric_compatibility", "dirac_block_hermiticity",
              "dirac_selfadjoint_trace_iff", "dirac_chirality_symmetry",
              "modified_dirac_hermitian", "metric_scaling_law"})
            add(disabled_check(name, "runs under the verify subcommand"));

        CheckResult res;
        res.name = "su2_quadrature_oracles";
        res.description =
            "integral of div(V) vanishes by quadrature for five test fields; "
            "blockwise Dirac eigenvalues match the Euler-angle Galerkin "
            "discretization";
        if (!is_eps_su2(*p.algebra)) {
            throw UnsupportedAlgebra(
                "quadrature oracles require an su(2) structure table");
        }
        double defect = 0.0;
        std::string note;
        {
            const Su2Grid grid =
                Su2Grid::make(p.config.grid_periodic, p.config.grid_theta);
            const Su2Realization su2(*p.algebra);
            std::vector<FundamentalField> fields;
            fields.push_back({{{0, MatrixPolynomial::constant(1.0)}}});
            fields.push_back({{{2, MatrixPolynomial::constant(1.0)}}});
            fields.push_back({{{0, MatrixPolynomial::random(2, p.config.seed + 11)}}});
            fields.push_back({{{1, MatrixPolynomial::random(2, p.config.seed + 12)}}});
            fields.push_back({{{0, MatrixPolynomial::random(2, p.config.seed + 13)},
                               {2, MatrixPolynomial::random(2, p.config.seed + 14)}}});
            double max_div = 0.0;
            for (const auto& field : fields)
                max_div = std::max(
                    max_div,
                    std::abs(divergence_quadrature(p.geom, p.g0, field, grid)));
            note += "max_divergence=" + format_double(max_div);
            defect = std::max(defect, max_div);
        }
        {
            const Su2Grid grid =
                Su2Grid::make(p.config.oracle_grid, p.config.oracle_grid);
            double max_mismatch = 0.0;
            for (int two_j = 0; two_j <= p.config.oracle_two_j; ++two_j) {
                const GalerkinResult oracle =
                    dirac_galerkin_oracle(p.ctx, two_j, grid);
                if (oracle.eigenvalues.empty()) continue;
                max_mismatch = std::max(
                    max_mismatch,
                    std::max(oracle.equivariance_defect, oracle.gram_defect));
                const DiracBlock block =
                    block_operator(p.ctx, su2_irrep(*p.algebra, two_j));
                std::vector<double> expect;
                for (const auto& ev : block.eigenvalues)
                    for (int m = 0; m < block.multiplicity; ++m)
                        expect.push_back(ev.real());
                std::sort(expect.begin(), expect.end());
                std::vector<double> got;
                for (const auto& ev : oracle.eigenvalues) got.push_back(ev.real());
                std::sort(got.begin(), got.end());
                if (expect.size() != got.size()) {
                    max_mismatch = 1.0;
                    continue;
                }
                for (size_t i = 0; i < got.size(); ++i)
                    max_mismatch =
                        std::max(max_mismatch, std::abs(got[i] - expect[i]));
            }
            note += " max_galerkin_mismatch=" + format_double(max_mismatch);
            defect = std::max(defect, max_mismatch);
        }
        res.defect = defect;
        res.tolerance = 1e-6 * ts;
        res.passed = defect <= res.tolerance;
        res.note = note;
        add(std::move(res));
    }

    report.metadata_json = metadata_json(p).dump();
    return report;
}

json report_to_json(const Pipeline& p, const PropertyReport& report) {
    json j;
    j["all_passed"] = report.all_passed();
    j["metadata"] = json::parse(report.metadata_json);
    json checks = json::array();
    for (const auto& c : report.checks) {
        json row;
        row["name"] = c.name;
        row["description"] = c.description;
        row["defect"] = c.defect;
        row["tolerance"] = c.tolerance;
        row["enabled"] = c.enabled;
        row["passed"] = c.passed;
        row["note"] = c.note;
        checks.push_back(row);
    }
    j["checks"] = checks;
    (void)p;
    return j;
}

}  // namespace

RunResult run_verify(const RunConfig& config) {
    const auto p = build_pipeline(config);
    RunResult result;
    result.report = run_battery(*p, false);
    result.report_json = report_to_json(*p, result.report).dump(2) + "\n";
    return result;
}

RunResult run_spectrum(const RunConfig& config) {
    const auto p = build_pipeline(config);
    RunResult result;
    result.report = run_battery(*p, false);
    try {
        result.spectrum = spectrum(p->ctx, p->irreps);
        result.spectrum_csv = spectrum_to_csv(*result.spectrum);
    } catch (const Error& e) {
        CheckResult res;
        res.name = "spectrum_stage";
        res.description = "blockwise spectrum assembly";
        res.defect = 1.0;
        res.tolerance = 0.5;
        res.passed = false;
        res.note = std::string("stage spectrum: ") + e.what();
        result.report.checks.push_back(std::move(res));
    }
    result.report_json = report_to_json(*p, result.report).dump(2) + "\n";
    return result;
}

RunResult run_oracle(const RunConfig& config) {
    const auto p = build_pipeline(config);
    RunResult result;
    result.report = run_battery(*p, true);
    result.report_json = report_to_json(*p, result.report).dump(2) + "\n";
    return result;
}

int write_outputs(const RunConfig& config, const RunResult& result) {
    namespace fs = std::filesystem;
    if (!config.out_dir.empty()) {
        fs::create_directories(config.out_dir);
        std::ofstream report(fs::path(config.out_dir) / "report.json");
        report << result.report_json;
        if (result.spectrum) {
            std::ofstream csv(fs::path(config.out_dir) / "spectrum.csv");
            csv << result.spectrum_csv;
        }
    }
    return result.report.all_passed() ? 0 : 1;
}

}  // namespace coorbit
