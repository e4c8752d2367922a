#include "coorbit/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace coorbit {

OrbitDatum solve_z(const LieAlgebra& g, const VectorXd& mu) {
    if (mu.size() != g.dim())
        throw DimensionMismatch("mu must have algebra dimension");
    if (mu.norm() == 0.0) throw ZeroFunctional("mu must be nonzero");
    OrbitDatum d;
    d.mu = mu;
    d.z = Eigen::LDLT<MatrixXd>(g.kil()).solve(mu);
    return d;
}

OrbitDatum datum_from_z(const LieAlgebra& g, const VectorXd& z) {
    if (z.size() != g.dim())
        throw DimensionMismatch("z must have algebra dimension");
    if (z.norm() == 0.0) throw ZeroFunctional("z must be nonzero");
    OrbitDatum d;
    d.z = z;
    d.mu = g.kil() * z;
    return d;
}

OrbitDatum datum_from_json_text(const LieAlgebra& g, const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("orbit datum is not valid JSON: ") + e.what());
    }
    const char* key = j.contains("mu") ? "mu" : j.contains("z") ? "z" : nullptr;
    if (!key) throw IoError("orbit datum needs \"mu\" or \"z\"");
    const auto vals = j[key].get<std::vector<double>>();
    VectorXd v = Eigen::Map<const VectorXd>(vals.data(), vals.size());
    return std::string(key) == "mu" ? solve_z(g, v) : datum_from_z(g, v);
}

OrbitDatum datum_from_json_file(const LieAlgebra& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open orbit datum " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return datum_from_json_text(g, ss.str());
}

std::pair<Subspace, Subspace> stabilizer_split(const LieAlgebra& g,
                                               const OrbitDatum& datum) {
    const int d = g.dim();
    // Work in coordinates where kil is the identity so the SVD threshold is
    // scale-invariant and the resulting bases come out kil-orthonormal.
    const MatrixXd a_tilde = g.kil_sqrt() * g.ad_of(datum.z) * g.kil_sqrt_inv();
    Eigen::JacobiSVD<MatrixXd> svd(a_tilde, Eigen::ComputeFullV);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-9 * smax) ++rank;

    const MatrixXd v = svd.matrixV();
    Subspace m_sub, k_sub;
    m_sub.basis = g.kil_sqrt_inv() * v.leftCols(rank);
    k_sub.basis = g.kil_sqrt_inv() * v.rightCols(d - rank);
    m_sub.projector = m_sub.basis * m_sub.basis.transpose() * g.kil();
    k_sub.projector = k_sub.basis * k_sub.basis.transpose() * g.kil();

    if (rank % 2 != 0)
        throw Error("PostconditionFailed", "dim m must be even");

    // [k, m] stays in m.
    double defect = 0.0;
    for (int i = 0; i < d - rank; ++i)
        for (int j = 0; j < rank; ++j) {
            const VectorXd br = g.bracket(k_sub.basis.col(i), m_sub.basis.col(j));
            defect = std::max(defect, (br - m_sub.projector * br).norm());
        }
    if (defect > 1e-8 * (1.0 + datum.z.norm()))
        throw Error("PostconditionFailed", "[k, m] is not contained in m");

    return {k_sub, m_sub};
}

MatrixXd OrbitGeometry::ad_on_m(const VectorXd& z) const {
    return m_sub.basis.transpose() * algebra->kil() * algebra->ad_of(z) *
           m_sub.basis;
}

MatrixXd OrbitGeometry::metric_gram(const std::string& which) const {
    if (which == "kahler") return g_metric;
    if (which == "killing") return MatrixXd::Identity(r(), r());
    throw ConfigError("metric must be \"kahler\" or \"killing\", got " + which);
}

OrbitGeometry kahler_structure(const LieAlgebra& g, const OrbitDatum& datum,
                               const Subspace& k_sub, const Subspace& m_sub) {
    OrbitGeometry geom;
    geom.algebra = &g;
    geom.datum = datum;
    geom.k_sub = k_sub;
    geom.m_sub = m_sub;

    const int r = m_sub.rank();
    geom.gamma = geom.ad_on_m(datum.z);

    const double skew = (geom.gamma + geom.gamma.transpose()).cwiseAbs().maxCoeff();
    if (skew > 1e-9 * (1.0 + geom.gamma.norm()))
        throw SingularGamma("gamma is not kil-skew; split is inconsistent");

    // Polar part from the eigendecomposition of gamma^T gamma.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(geom.gamma.transpose() * geom.gamma);
    const double emax = es.eigenvalues().maxCoeff();
    if (emax <= 0.0 || es.eigenvalues().minCoeff() <= 1e-18 * emax)
        throw SingularGamma("gamma is singular on m");
    geom.gamma_abs = es.operatorSqrt();
    geom.J = es.operatorInverseSqrt() * geom.gamma;

    geom.omega = geom.gamma.transpose();
    geom.g_metric = 0.5 * (geom.gamma_abs + geom.gamma_abs.transpose());

    const MatrixXd id = MatrixXd::Identity(r, r);
    if ((geom.J * geom.J + id).cwiseAbs().maxCoeff() > 1e-10)
        throw SingularGamma("polar decomposition failed: J^2 != -I");

    return geom;
}

OrbitGeometry kahler_structure(const LieAlgebra& g, const OrbitDatum& datum) {
    auto [k_sub, m_sub] = stabilizer_split(g, datum);
    return kahler_structure(g, datum, k_sub, m_sub);
}

int WeightData::find(double value, double rel_tol) const {
    for (int i = 0; i < count(); ++i)
        if (std::abs(weights[i] - value) <=
            rel_tol * std::max({1.0, weights[i], std::abs(value)}))
            return i;
    return -1;
}

WeightData weight_decomposition(const OrbitGeometry& geom, double cluster_rel_tol) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(geom.gamma_abs);
    const VectorXd lam = es.eigenvalues();  // ascending
    const int r = geom.r();
    const double lmax = lam(r - 1);

    // Deterministic eigenvector signs.
    MatrixXd vec = es.eigenvectors();
    for (int i = 0; i < r; ++i) {
        int arg = 0;
        vec.col(i).cwiseAbs().maxCoeff(&arg);
        if (vec(arg, i) < 0.0) vec.col(i) = -vec.col(i);
    }

    WeightData w;
    w.ordered_basis = vec;
    int begin = 0;
    for (int i = 1; i <= r; ++i) {
        const bool split = (i == r) || (lam(i) - lam(i - 1) > cluster_rel_tol * lam(i));
        if (!split) continue;
        const int count = i - begin;
        const double spread = lam(i - 1) - lam(begin);
        if (spread > 5.0 * cluster_rel_tol * lam(i - 1))
            throw ClusterAmbiguity(
                "chained eigenvalue cluster wider than the merge tolerance");
        const double value = lam.segment(begin, count).mean();
        if (value <= 1e-12 * lmax)
            throw SingularGamma("weight cluster at zero");
        const MatrixXd block = vec.middleCols(begin, count);
        w.weights.push_back(value);
        w.projectors.push_back(block * block.transpose());
        w.subspace_dims.push_back(count);
        begin = i;
    }

    // Construction-time verification of the spectral data.
    MatrixXd recon = MatrixXd::Zero(r, r);
    MatrixXd psum = MatrixXd::Zero(r, r);
    double defect = 0.0;
    for (int i = 0; i < w.count(); ++i) {
        recon += w.weights[i] * w.projectors[i];
        psum += w.projectors[i];
        if (w.subspace_dims[i] % 2 != 0)
            throw ClusterAmbiguity("weight space of odd dimension");
        defect = std::max(defect,
                          (geom.J * w.projectors[i] - w.projectors[i] * geom.J)
                              .cwiseAbs()
                              .maxCoeff());
    }
    defect = std::max(defect, (recon - geom.gamma_abs).cwiseAbs().maxCoeff());
    defect = std::max(
        defect, (psum - MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff());
    if (defect > 1e-9 * (1.0 + lmax))
        throw ClusterAmbiguity("weight decomposition failed verification");

    return w;
}

}  // namespace coorbit
