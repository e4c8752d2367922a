#include "coorbit/dirac.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace coorbit {

namespace {

using cd = std::complex<double>;

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

double matrix_scale(const std::vector<MatrixXcd>& ms) {
    double s = 1.0;
    for (const auto& m : ms) s = std::max(s, m.cwiseAbs().maxCoeff());
    return s;
}

}  // namespace

MatrixXcd IrrepData::of(const VectorXd& x) const {
    if (x.size() != static_cast<Eigen::Index>(generators.size()))
        throw DimensionMismatch("irrep argument must have algebra dimension");
    MatrixXcd out = MatrixXcd::Zero(dim, dim);
    for (size_t i = 0; i < generators.size(); ++i)
        if (x[i] != 0.0) out += x[i] * generators[i];
    return out;
}

double IrrepData::validation_defect(const LieAlgebra& g) const {
    const int d = g.dim();
    double defect = 0.0;
    for (int i = 0; i < d; ++i)
        defect = std::max(defect, (generators[i] + generators[i].adjoint())
                                      .cwiseAbs()
                                      .maxCoeff());
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            MatrixXcd lhs = MatrixXcd::Zero(dim, dim);
            for (int k = 0; k < d; ++k)
                if (g.c(i, j, k) != 0.0) lhs += g.c(i, j, k) * generators[k];
            const MatrixXcd rhs =
                generators[i] * generators[j] - generators[j] * generators[i];
            defect = std::max(defect, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    }
    return defect;
}

IrrepData su2_irrep(const LieAlgebra& g, int two_j) {
    if (two_j < 0) throw ConfigError("two_j must be nonnegative");
    if (g.dim() != 3) throw UnsupportedAlgebra("spin-j generators need a 3-dim algebra");
    const double c = g.c(0, 1, 2);
    if (c == 0.0)
        throw UnsupportedAlgebra("structure constants are not proportional to eps_ijk");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                const int eps = (i == 0 && j == 1 && k == 2) ||
                                        (i == 1 && j == 2 && k == 0) ||
                                        (i == 2 && j == 0 && k == 1)
                                    ? 1
                                : (i == 2 && j == 1 && k == 0) ||
                                        (i == 0 && j == 2 && k == 1) ||
                                        (i == 1 && j == 0 && k == 2)
                                    ? -1
                                    : 0;
                if (std::abs(g.c(i, j, k) - c * eps) > 1e-10 * std::abs(c))
                    throw UnsupportedAlgebra(
                        "structure constants are not proportional to eps_ijk");
            }

    const int d = two_j + 1;
    const double j = two_j / 2.0;
    MatrixXcd jp = MatrixXcd::Zero(d, d), j3 = MatrixXcd::Zero(d, d);
    // Row index i corresponds to m = j - i.
    for (int i = 0; i < d; ++i) j3(i, i) = j - i;
    for (int i = 1; i < d; ++i) {
        const double m = j - i;
        jp(i - 1, i) = std::sqrt((j - m) * (j + m + 1.0));
    }
    const MatrixXcd jm = jp.adjoint();
    const MatrixXcd j1 = 0.5 * (jp + jm);
    const MatrixXcd j2 = cd(0.0, -0.5) * (jp - jm);

    IrrepData irrep;
    irrep.label = "spin-" + std::to_string(two_j) + "/2";
    if (two_j % 2 == 0) irrep.label = "spin-" + std::to_string(two_j / 2);
    irrep.dim = d;
    const cd factor = cd(0.0, -1.0) * c;
    irrep.generators = {factor * j1, factor * j2, factor * j3};
    return irrep;
}

IrrepData adjoint_irrep(const LieAlgebra& g) {
    IrrepData irrep;
    irrep.label = "adjoint";
    irrep.dim = g.dim();
    for (int i = 0; i < g.dim(); ++i)
        irrep.generators.push_back(
            (g.kil_sqrt() * g.ad(i) * g.kil_sqrt_inv()).cast<cd>());
    return irrep;
}

IrrepData sun_defining_irrep(const LieAlgebra& g) {
    if (g.defining_matrices().empty())
        throw UnsupportedAlgebra("defining irrep requires a built-in su(n) algebra");
    IrrepData irrep;
    irrep.label = "defining";
    irrep.dim = static_cast<int>(g.defining_matrices()[0].rows());
    irrep.generators = g.defining_matrices();
    return irrep;
}

IrrepData irrep_from_json_text(const LieAlgebra& g, const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("irrep file is not valid JSON: ") + e.what());
    }
    IrrepData irrep;
    irrep.label = j.value("label", "unnamed");
    irrep.dim = j.at("dim").get<int>();
    for (const auto& gen : j.at("generators")) {
        MatrixXcd m(irrep.dim, irrep.dim);
        for (int r = 0; r < irrep.dim; ++r)
            for (int c = 0; c < irrep.dim; ++c)
                m(r, c) = cd(gen.at(r).at(c).at(0).get<double>(),
                             gen.at(r).at(c).at(1).get<double>());
        irrep.generators.push_back(std::move(m));
    }
    if (irrep.generators.size() != static_cast<size_t>(g.dim()))
        throw IoError("irrep file must provide one generator per basis element");
    const double defect = irrep.validation_defect(g);
    if (defect > 1e-9 * matrix_scale(irrep.generators))
        throw IoError("irrep generators fail the commutator/unitarity checks");
    return irrep;
}

IrrepData irrep_from_json_file(const LieAlgebra& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open irrep file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return irrep_from_json_text(g, ss.str());
}

std::string irrep_to_json_text(const IrrepData& irrep) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : irrep.generators) {
        nlohmann::json rows = nlohmann::json::array();
        for (int r = 0; r < irrep.dim; ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < irrep.dim; ++c)
                row.push_back({g(r, c).real(), g(r, c).imag()});
            rows.push_back(row);
        }
        gens.push_back(rows);
    }
    nlohmann::json j{{"label", irrep.label}, {"dim", irrep.dim}, {"generators", gens}};
    return j.dump(2);
}

double CharacterData::commutator_defect(const LieAlgebra& g,
                                        const Subspace& k_sub) const {
    const int q = k_sub.rank();
    double defect = 0.0;
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j) {
            const VectorXd br = g.bracket(k_sub.basis.col(i), k_sub.basis.col(j));
            defect = std::max(defect, std::abs(weight.dot(k_sub.coords(g, br))));
        }
    return defect;
}

BlockContext make_block_context(const OrbitGeometry& geom,
                                const WeightData& weights, const FockSpace& fock,
                                const ConnectionMap& conn, const MatrixXd& g0,
                                const CharacterData& character, int orientation) {
    (void)weights;
    BlockContext ctx;
    ctx.geom = &geom;
    ctx.fock = &fock;
    ctx.conn = conn;
    ctx.g0 = g0;
    ctx.character = character;
    if (ctx.character.weight.size() == 0)
        ctx.character.weight = VectorXd::Zero(geom.k_sub.rank());
    if (ctx.character.weight.size() != geom.k_sub.rank())
        throw ConfigError("character weight dimension must equal dim k");
    ctx.orientation = orientation;
    ctx.frame = orthonormal_frame(g0);
    return ctx;
}

namespace {

// Equivariance operators whose joint kernel is Hom_K(V, S (x) chi).
std::vector<MatrixXcd> equivariance_operators(const BlockContext& ctx,
                                              const IrrepData& irrep,
                                              bool include_weight) {
    const OrbitGeometry& geom = *ctx.geom;
    const FockSpace& fock = *ctx.fock;
    const int q = geom.k_sub.rank();
    const int fdim = fock.dim();
    std::vector<MatrixXcd> ops;
    const MatrixXcd id_v = MatrixXcd::Identity(irrep.dim, irrep.dim);
    const MatrixXcd id_s = MatrixXcd::Identity(fdim, fdim);
    for (int i = 0; i < q; ++i) {
        const VectorXd z = geom.k_sub.basis.col(i);
        const MatrixXcd dpi = irrep.of(z);
        const MatrixXcd sigma = fock.derivation_lift(geom.ad_on_m(z));
        MatrixXcd op = kron(MatrixXcd(-dpi.transpose()), id_s) + kron(id_v, sigma);
        if (include_weight)
            op += cd(0.0, ctx.character.weight[i]) *
                  MatrixXcd::Identity(irrep.dim * fdim, irrep.dim * fdim);
        ops.push_back(std::move(op));
    }
    return ops;
}

}  // namespace

MatrixXcd invariant_subspace(const BlockContext& ctx, const IrrepData& irrep,
                             double rank_tol) {
    const auto ops = equivariance_operators(ctx, irrep, true);
    const int total = irrep.dim * ctx.fock->dim();
    if (ops.empty()) return MatrixXcd::Identity(total, total);

    MatrixXcd stacked(static_cast<Eigen::Index>(ops.size()) * total, total);
    for (size_t i = 0; i < ops.size(); ++i)
        stacked.middleRows(static_cast<Eigen::Index>(i) * total, total) = ops[i];
    Eigen::JacobiSVD<MatrixXcd> svd(stacked, Eigen::ComputeFullV);
    const double smax =
        svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > rank_tol * std::max(smax, 1.0)) ++rank;
    return svd.matrixV().rightCols(total - rank);
}

MatrixXcd big_dirac_matrix(const BlockContext& ctx, const IrrepData& irrep) {
    const OrbitGeometry& geom = *ctx.geom;
    const FockSpace& fock = *ctx.fock;
    const int fdim = fock.dim();
    const int total = irrep.dim * fdim;
    const MatrixXcd id_v = MatrixXcd::Identity(irrep.dim, irrep.dim);
    MatrixXcd out = MatrixXcd::Zero(total, total);
    for (int a = 0; a < geom.r(); ++a) {
        const VectorXd f = ctx.frame.col(a);
        const MatrixXcd kap = fock.kappa(f);
        const MatrixXcd dpi = irrep.of(geom.membed(f));
        out += kron(MatrixXcd(-dpi.transpose()), kap);
        const MatrixXd ell_map = ctx.conn.endomorphism(f);
        if (ell_map.cwiseAbs().maxCoeff() > 0.0)
            out += kron(id_v, MatrixXcd(kap * fock.derivation_lift(ell_map)));
    }
    return out;
}

MatrixXcd big_m_matrix(const BlockContext& ctx, const IrrepData& irrep) {
    const OrbitGeometry& geom = *ctx.geom;
    const FockSpace& fock = *ctx.fock;
    const MatrixXcd id_v = MatrixXcd::Identity(irrep.dim, irrep.dim);
    MatrixXcd out = MatrixXcd::Zero(irrep.dim * fock.dim(), irrep.dim * fock.dim());
    for (int a = 0; a < geom.r(); ++a) {
        const VectorXd f = ctx.frame.col(a);
        const MatrixXd ell_map = ctx.conn.endomorphism(f);
        if (ell_map.cwiseAbs().maxCoeff() > 0.0)
            out += kron(id_v, MatrixXcd(fock.kappa(f) * fock.derivation_lift(ell_map)));
    }
    return out;
}

namespace {

double restriction_defect(const MatrixXcd& big, const MatrixXcd& basis) {
    if (basis.cols() == 0) return 0.0;
    const MatrixXcd image = big * basis;
    const MatrixXcd residual = image - basis * (basis.adjoint() * image);
    return residual.norm() / std::max(1.0, image.norm());
}

void finish_block(DiracBlock& block, const BlockContext& ctx,
                  const MatrixXcd& restricted_chirality, double herm_tol) {
    (void)ctx;
    block.hermiticity_defect =
        (block.d_matrix - block.d_matrix.adjoint()).cwiseAbs().maxCoeff();
    block.chirality = restricted_chirality;
    block.chirality_anticommutator =
        (block.chirality * block.d_matrix + block.d_matrix * block.chirality)
            .cwiseAbs()
            .maxCoeff();
    if (block.size() == 0) return;
    if (block.hermiticity_defect <= herm_tol) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
            0.5 * (block.d_matrix + block.d_matrix.adjoint()));
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            block.eigenvalues.emplace_back(es.eigenvalues()(i), 0.0);
    } else {
        Eigen::ComplexEigenSolver<MatrixXcd> es(block.d_matrix);
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            block.eigenvalues.push_back(es.eigenvalues()(i));
        std::sort(block.eigenvalues.begin(), block.eigenvalues.end(),
                  [](cd a, cd b) {
                      return a.real() != b.real() ? a.real() < b.real()
                                                  : a.imag() < b.imag();
                  });
    }
}

}  // namespace

DiracBlock block_operator(const BlockContext& ctx, const IrrepData& irrep,
                          const MatrixXcd& inv_basis, double preserve_tol) {
    DiracBlock block;
    block.irrep_label = irrep.label;
    block.irrep_dim = irrep.dim;
    block.multiplicity = irrep.dim;
    block.inv_basis = inv_basis;
    if (inv_basis.cols() == 0) {
        block.d_matrix.resize(0, 0);
        block.chirality.resize(0, 0);
        return block;
    }

    const MatrixXcd big = big_dirac_matrix(ctx, irrep);
    block.preservation_defect = restriction_defect(big, inv_basis);
    const MatrixXcd gamma_big =
        kron(MatrixXcd::Identity(irrep.dim, irrep.dim),
             ctx.fock->chirality(ctx.orientation));
    block.preservation_defect = std::max(block.preservation_defect,
                                         restriction_defect(gamma_big, inv_basis));
    if (block.preservation_defect > preserve_tol)
        throw SubspaceNotPreserved(
            "Dirac matrix does not preserve the invariant subspace; "
            "the connection is not K-equivariant");

    block.d_matrix = inv_basis.adjoint() * big * inv_basis;
    finish_block(block, ctx, MatrixXcd(inv_basis.adjoint() * gamma_big * inv_basis),
                 1e-8);
    return block;
}

DiracBlock block_operator(const BlockContext& ctx, const IrrepData& irrep,
                          double preserve_tol) {
    return block_operator(ctx, irrep, invariant_subspace(ctx, irrep), preserve_tol);
}

DiracBlock modified_dirac(const BlockContext& ctx, const IrrepData& irrep,
                          double preserve_tol) {
    const MatrixXcd inv_basis = invariant_subspace(ctx, irrep);
    DiracBlock block;
    block.irrep_label = irrep.label + " (modified)";
    block.irrep_dim = irrep.dim;
    block.multiplicity = irrep.dim;
    block.inv_basis = inv_basis;
    if (inv_basis.cols() == 0) {
        block.d_matrix.resize(0, 0);
        block.chirality.resize(0, 0);
        return block;
    }

    const MatrixXcd big_d = big_dirac_matrix(ctx, irrep);
    const MatrixXcd big_m = big_m_matrix(ctx, irrep);
    block.preservation_defect =
        std::max(restriction_defect(big_d, inv_basis),
                 restriction_defect(big_m, inv_basis));
    if (block.preservation_defect > preserve_tol)
        throw SubspaceNotPreserved(
            "modified Dirac does not preserve the invariant subspace");

    const MatrixXcd d = inv_basis.adjoint() * big_d * inv_basis;
    const MatrixXcd m = inv_basis.adjoint() * big_m * inv_basis;
    block.d_matrix = d - 0.5 * (m - m.adjoint());
    const MatrixXcd gamma_big =
        kron(MatrixXcd::Identity(irrep.dim, irrep.dim),
             ctx.fock->chirality(ctx.orientation));
    finish_block(block, ctx, MatrixXcd(inv_basis.adjoint() * gamma_big * inv_basis),
                 1e-8);
    return block;
}

double SpectrumResult::negation_symmetry_defect() const {
    std::vector<double> flat;
    for (const auto& row : rows)
        for (int i = 0; i < row.multiplicity; ++i) flat.push_back(row.eigenvalue_re);
    std::sort(flat.begin(), flat.end());
    double defect = 0.0;
    const size_t n = flat.size();
    for (size_t i = 0; i < n; ++i)
        defect = std::max(defect, std::abs(flat[i] + flat[n - 1 - i]));
    return defect;
}

SpectrumResult spectrum(const BlockContext& ctx,
                        const std::vector<IrrepData>& irreps, bool modified,
                        double herm_tol) {
    SpectrumResult result;
    bool any_nonempty = false;
    for (const auto& irrep : irreps) {
        DiracBlock block = modified ? modified_dirac(ctx, irrep)
                                    : block_operator(ctx, irrep);
        if (block.size() > 0) any_nonempty = true;
        if (block.size() > 0 && block.hermiticity_defect > herm_tol)
            result.non_hermitian = true;
        for (const auto& ev : block.eigenvalues) {
            SpectrumRow row;
            row.eigenvalue_re = ev.real();
            row.eigenvalue_im = std::abs(ev.imag()) <= 1e-9 ? 0.0 : ev.imag();
            row.multiplicity = block.multiplicity;
            row.irrep_label = block.irrep_label;
            row.block_dim = block.size();
            result.rows.push_back(std::move(row));
        }
        result.blocks.push_back(std::move(block));
    }
    result.empty_warning = !any_nonempty;
    std::sort(result.rows.begin(), result.rows.end(),
              [](const SpectrumRow& a, const SpectrumRow& b) {
                  if (a.eigenvalue_re != b.eigenvalue_re)
                      return a.eigenvalue_re < b.eigenvalue_re;
                  if (a.eigenvalue_im != b.eigenvalue_im)
                      return a.eigenvalue_im < b.eigenvalue_im;
                  return a.irrep_label < b.irrep_label;
              });
    return result;
}

std::string spectrum_to_csv(const SpectrumResult& result) {
    std::string out = "eigenvalue_re,eigenvalue_im,multiplicity,irrep_label,block_dim\n";
    char buf[160];
    for (const auto& row : result.rows) {
        std::snprintf(buf, sizeof(buf), "%.12e,%.12e,%d,%s,%d\n",
                      row.eigenvalue_re, row.eigenvalue_im, row.multiplicity,
                      row.irrep_label.c_str(), row.block_dim);
        out += buf;
    }
    return out;
}

std::vector<VectorXd> matching_characters(const BlockContext& ctx,
                                          const IrrepData& irrep,
                                          double merge_tol) {
    const auto ops = equivariance_operators(ctx, irrep, false);
    const int q = static_cast<int>(ops.size());
    const int total = irrep.dim * ctx.fock->dim();
    if (q == 0) return {};

    // The operators commute and are anti-Hermitian; a generic Hermitian
    // combination separates their joint eigenspaces.
    MatrixXcd h = MatrixXcd::Zero(total, total);
    double coeff = 1.0;
    for (const auto& op : ops) {
        h += coeff * (cd(0.0, -1.0) * op);
        coeff *= 0.4142135623730951;  // sqrt(2) - 1
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (h + h.adjoint()));

    std::vector<VectorXd> found;
    for (int i = 0; i < total; ++i) {
        const VectorXcd v = es.eigenvectors().col(i);
        VectorXd w(q);
        bool genuine = true;
        for (int k = 0; k < q; ++k) {
            const VectorXcd image = ops[k] * v;
            const cd lambda = v.dot(image);
            if ((image - lambda * v).norm() > 1e-7 * std::max(1.0, image.norm()))
                genuine = false;
            w[k] = -lambda.imag();
        }
        if (!genuine) continue;
        bool duplicate = false;
        for (const auto& prev : found)
            if ((prev - w).cwiseAbs().maxCoeff() <= merge_tol) duplicate = true;
        if (!duplicate) found.push_back(std::move(w));
    }
    std::sort(found.begin(), found.end(), [](const VectorXd& a, const VectorXd& b) {
        for (int i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    });
    return found;
}

}  // namespace coorbit
