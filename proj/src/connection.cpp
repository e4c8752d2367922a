#include "coorbit/connection.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "json.hpp"

namespace coorbit {

namespace {

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::vector<MatrixXd> zero_tensor(int r) {
    return std::vector<MatrixXd>(r, MatrixXd::Zero(r, r));
}

ConnectionMap assemble(const std::string& label, const OrbitGeometry& geom,
                       const std::function<VectorXd(const VectorXd&, const VectorXd&)>& map) {
    const int r = geom.r();
    ConnectionMap conn;
    conn.label = label;
    conn.ell = zero_tensor(r);
    const MatrixXd id = MatrixXd::Identity(r, r);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            conn.ell[a].col(b) = map(id.col(a), id.col(b));
    return conn;
}

}  // namespace

VectorXd ConnectionMap::apply(const VectorXd& x, const VectorXd& y) const {
    VectorXd out = VectorXd::Zero(y.size());
    for (int a = 0; a < r(); ++a)
        if (x[a] != 0.0) out += x[a] * (ell[a] * y);
    return out;
}

MatrixXd ConnectionMap::endomorphism(const VectorXd& x) const {
    MatrixXd out = MatrixXd::Zero(ell[0].rows(), ell[0].cols());
    for (int a = 0; a < r(); ++a)
        if (x[a] != 0.0) out += x[a] * ell[a];
    return out;
}

double ConnectionMap::compatibility_defect(const MatrixXd& g0) const {
    double defect = 0.0;
    for (const auto& e : ell)
        defect = std::max(defect,
                          (e.transpose() * g0 + g0 * e).cwiseAbs().maxCoeff());
    return defect;
}

double ConnectionMap::j_commutation_defect(const MatrixXd& J) const {
    double defect = 0.0;
    for (const auto& e : ell)
        defect = std::max(defect, (J * e - e * J).cwiseAbs().maxCoeff());
    return defect;
}

VectorXd lct(const OrbitGeometry& geom, const VectorXd& x, const VectorXd& y) {
    return 0.5 * geom.mbracket(x, y);
}

VectorXd ls_general(const OrbitGeometry& geom, const MatrixXd& S,
                    const VectorXd& x, const VectorXd& y) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::abs(es.eigenvalues().maxCoeff()))
        throw SingularS("S must be positive-definite on m");
    const VectorXd t = geom.mbracket(x, VectorXd(S * y)) +
                       geom.mbracket(y, VectorXd(S * x));
    return 0.5 * es.operatorInverseSqrt() * (es.operatorInverseSqrt() * t);
}

VectorXd koszul_solve(const OrbitGeometry& geom, const MatrixXd& g0,
                      const VectorXd& x, const VectorXd& y) {
    const int r = geom.r();
    const MatrixXd id = MatrixXd::Identity(r, r);
    VectorXd rhs(r);
    for (int c = 0; c < r; ++c) {
        const VectorXd e = id.col(c);
        rhs[c] = x.dot(g0 * geom.mbracket(e, y)) + geom.mbracket(e, x).dot(g0 * y);
    }
    return 0.5 * Eigen::LDLT<MatrixXd>(g0).solve(rhs);
}

VectorXd ldiamond(const OrbitGeometry& geom, const WeightData& weights,
                  const VectorXd& x, const VectorXd& y) {
    VectorXd out = VectorXd::Zero(geom.r());
    for (int ai = 0; ai < weights.count(); ++ai) {
        const VectorXd xa = weights.projectors[ai] * x;
        if (xa.norm() == 0.0) continue;
        for (int bi = 0; bi < weights.count(); ++bi) {
            if (bi == ai) continue;  // both prefactors vanish with sign(0) = 0
            const VectorXd yb = weights.projectors[bi] * y;
            if (yb.norm() == 0.0) continue;
            const double a = weights.weights[ai], b = weights.weights[bi];
            const VectorXd bxy = geom.mbracket(xa, yb);
            const VectorXd bjj =
                geom.mbracket(VectorXd(geom.J * xa), VectorXd(geom.J * yb));
            out += 0.25 * ((b - a) / (a + b) * (bxy - bjj) +
                           sign_of(b - a) * (bxy + bjj));
        }
    }
    return out;
}

ConnectionMap zero_connection(int r) {
    ConnectionMap conn;
    conn.label = "canonical";
    conn.ell = zero_tensor(r);
    return conn;
}

ConnectionMap lct_connection(const OrbitGeometry& geom) {
    return assemble("natural-torsion-free", geom,
                    [&](const VectorXd& x, const VectorXd& y) { return lct(geom, x, y); });
}

ConnectionMap levi_civita_connection(const OrbitGeometry& geom, const MatrixXd& S) {
    return assemble("levi-civita", geom, [&](const VectorXd& x, const VectorXd& y) {
        return lct(geom, x, y) + ls_general(geom, S, x, y);
    });
}

ConnectionMap coadjoint_connection(const OrbitGeometry& geom,
                                   const WeightData& weights) {
    return assemble("coadjoint-levi-civita", geom,
                    [&](const VectorXd& x, const VectorXd& y) {
                        return lct(geom, x, y) + ldiamond(geom, weights, x, y);
                    });
}

ConnectionMap koszul_connection(const OrbitGeometry& geom, const MatrixXd& g0) {
    return assemble("levi-civita-koszul", geom,
                    [&](const VectorXd& x, const VectorXd& y) {
                        return lct(geom, x, y) + koszul_solve(geom, g0, x, y);
                    });
}

ConnectionMap full_connection(const std::string& label, const OrbitGeometry& geom,
                              const WeightData& weights) {
    if (label == "canonical") return zero_connection(geom.r());
    if (label == "natural-torsion-free") return lct_connection(geom);
    if (label == "levi-civita") return levi_civita_connection(geom, geom.gamma_abs);
    if (label == "coadjoint-levi-civita") return coadjoint_connection(geom, weights);
    throw ConfigError("unknown connection label " + label);
}

ConnectionMap connection_from_json_text(const std::string& text, int r) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("connection tensor is not valid JSON: ") + e.what());
    }
    if (!j.contains("r") || !j.contains("ell"))
        throw IoError("connection tensor needs fields \"r\" and \"ell\"");
    if (j["r"].get<int>() != r)
        throw DimensionMismatch("connection tensor rank does not match dim m");
    ConnectionMap conn;
    conn.label = "custom";
    conn.ell = zero_tensor(r);
    for (const auto& entry : j["ell"]) {
        if (!entry.is_array() || entry.size() != 4)
            throw IoError("tensor entries must be [a, b, c, value]");
        const int a = entry[0].get<int>(), b = entry[1].get<int>(),
                  c = entry[2].get<int>();
        if (a < 0 || a >= r || b < 0 || b >= r || c < 0 || c >= r)
            throw IoError("tensor entry index out of range");
        conn.ell[a](c, b) = entry[3].get<double>();
    }
    return conn;
}

ConnectionMap connection_from_json_file(const std::string& path, int r) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open connection tensor " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return connection_from_json_text(ss.str(), r);
}

std::string connection_to_json_text(const ConnectionMap& conn) {
    nlohmann::json entries = nlohmann::json::array();
    const int r = conn.r();
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            for (int c = 0; c < r; ++c)
                if (conn.ell[a](c, b) != 0.0)
                    entries.push_back({a, b, c, conn.ell[a](c, b)});
    nlohmann::json j{{"r", r}, {"ell", entries}};
    return j.dump(2);
}

ConnectionMap adversarial_connection(const OrbitGeometry& geom,
                                     const WeightData& weights, unsigned seed,
                                     double eps) {
    const int r = geom.r();
    ConnectionMap conn = coadjoint_connection(geom, weights);
    conn.label = "custom";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int a = 0; a < r; ++a) {
        MatrixXd t(r, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) t(i, j) = dist(rng);
        // Complex-linear part of t; keeps the derivation lift well-defined.
        conn.ell[a] += eps * 0.5 * (t - geom.J * t * geom.J);
    }
    return conn;
}

VectorXd TorsionTensor::apply(const VectorXd& x, const VectorXd& y) const {
    VectorXd out = VectorXd::Zero(y.size());
    for (size_t a = 0; a < t.size(); ++a)
        if (x[a] != 0.0) out += x[a] * (t[a] * y);
    return out;
}

double TorsionTensor::max_norm() const {
    double m = 0.0;
    for (const auto& s : t) m = std::max(m, s.cwiseAbs().maxCoeff());
    return m;
}

double TorsionTensor::antisymmetry_defect() const {
    const int r = static_cast<int>(t.size());
    double defect = 0.0;
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            defect = std::max(defect, (t[a].col(b) + t[b].col(a)).cwiseAbs().maxCoeff());
    return defect;
}

TorsionTensor torsion(const OrbitGeometry& geom, const ConnectionMap& conn) {
    const int r = geom.r();
    const MatrixXd id = MatrixXd::Identity(r, r);
    TorsionTensor out;
    out.t = zero_tensor(r);
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            out.t[a].col(b) = -geom.mbracket(id.col(a), id.col(b)) +
                              conn.ell[a].col(b) - conn.ell[b].col(a);
    return out;
}

MatrixXd orthonormal_frame(const MatrixXd& g0) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(g0);
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::abs(es.eigenvalues().maxCoeff()))
        throw SingularS("metric Gram matrix must be positive-definite");
    return es.operatorInverseSqrt();
}

VectorXd trace_criterion(const OrbitGeometry& geom, const ConnectionMap& conn,
                         const MatrixXd& g0, const MatrixXd& frame) {
    const int r = geom.r();
    const MatrixXd id = MatrixXd::Identity(r, r);
    const TorsionTensor t = torsion(geom, conn);
    VectorXd out(r);
    for (int u = 0; u < r; ++u) {
        double acc = 0.0;
        for (int a = 0; a < r; ++a) {
            const VectorXd f = frame.col(a);
            acc += f.dot(g0 * t.apply(id.col(u), f));
        }
        out[u] = acc;
    }
    return out;
}

VectorXd trace_criterion(const OrbitGeometry& geom, const ConnectionMap& conn,
                         const MatrixXd& g0) {
    return trace_criterion(geom, conn, g0, orthonormal_frame(g0));
}

FrameSumReport frame_sum_check(const OrbitGeometry& geom,
                               const ConnectionMap& conn, const MatrixXd& g0) {
    const int r = geom.r();
    const MatrixXd frame = orthonormal_frame(g0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(g0);
    const MatrixXd s_half = es.operatorSqrt();
    const MatrixXd s_inv_half = es.operatorInverseSqrt();

    VectorXd frame_sum = VectorXd::Zero(r);
    VectorXd fundamental_sum = VectorXd::Zero(r);
    for (int a = 0; a < r; ++a) {
        const VectorXd f = frame.col(a);
        frame_sum += conn.apply(f, f);
        // X^(e) = -P X with X = S^{1/2} f, paired against S^{-1/2} f.
        fundamental_sum += conn.apply(VectorXd(-s_half * f), VectorXd(s_inv_half * f));
    }
    FrameSumReport report;
    report.norm = std::sqrt(frame_sum.dot(g0 * frame_sum));
    const VectorXd mismatch = frame_sum + fundamental_sum;
    report.agreement_defect = std::sqrt(mismatch.dot(g0 * mismatch));
    return report;
}

BracketDecompositionReport bracket_decomposition_check(
    const OrbitGeometry& geom, const WeightData& weights, int alpha_index,
    const VectorXd& x, int beta_index, const VectorXd& y) {
    const LieAlgebra& g = *geom.algebra;
    const auto knorm = [&](const VectorXd& v) {
        return std::sqrt(std::max(0.0, v.dot(g.kil() * v)));
    };

    const double a = weights.weights[alpha_index];
    const double b = weights.weights[beta_index];
    const VectorXd jx = geom.J * x, jy = geom.J * y;

    const VectorXd b_xy = geom.gbracket(x, y);
    const VectorXd b_jj = geom.gbracket(jx, jy);
    const VectorXd minus = b_xy - b_jj;
    const VectorXd plus = b_xy + b_jj;

    BracketDecompositionReport rep{};

    // minus lies in m_{a+b} (zero when a+b is not a weight).
    {
        const int idx = weights.find(a + b);
        VectorXd target = VectorXd::Zero(g.dim());
        if (idx >= 0)
            target = geom.membed(weights.projectors[idx] * geom.mcoords(minus));
        rep.minus_membership = knorm(minus - target);
    }

    // plus lies in k (a == b) or in m_{|a-b|}.
    if (alpha_index == beta_index) {
        rep.plus_membership = geom.mcoords(plus).norm();
        rep.j_plus_identity = (geom.J * geom.mcoords(plus)).norm();
    } else {
        const int idx = weights.find(std::abs(a - b));
        VectorXd target = VectorXd::Zero(g.dim());
        if (idx >= 0)
            target = geom.membed(weights.projectors[idx] * geom.mcoords(plus));
        rep.plus_membership = knorm(plus - target);
        const VectorXd rhs = sign_of(a - b) * (geom.gbracket(jx, y) - geom.gbracket(x, jy));
        rep.j_plus_identity =
            knorm(geom.membed(geom.J * geom.mcoords(plus)) - rhs);
    }

    {
        const VectorXd rhs = geom.gbracket(jx, y) + geom.gbracket(x, jy);
        rep.j_minus_identity =
            knorm(geom.membed(geom.J * geom.mcoords(minus)) - rhs);
    }

    rep.max_defect = std::max({rep.minus_membership, rep.plus_membership,
                               rep.j_minus_identity, rep.j_plus_identity});
    return rep;
}

}  // namespace coorbit
