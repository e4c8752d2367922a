#include "coorbit/fock.hpp"

#include <bit>
#include <cmath>

namespace coorbit {

namespace {

using cd = std::complex<double>;

inline double wedge_sign(unsigned mask, int k) {
    // Sign of e_k ^ e_mask when sorting e_k into ascending position.
    return (std::popcount(mask & ((1u << k) - 1u)) % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

VectorXcd ComplexModel::complex_coords(const VectorXd& x) const {
    VectorXcd z(n);
    for (int k = 0; k < n; ++k) z[k] = herm_j(basis.col(k), x);
    return z;
}

VectorXd ComplexModel::real_vector(const VectorXcd& z) const {
    VectorXd out = VectorXd::Zero(basis.rows());
    for (int k = 0; k < n; ++k)
        out += z[k].real() * basis.col(k) + z[k].imag() * (J * basis.col(k));
    return out;
}

ComplexModel complex_model(const MatrixXd& g0, const MatrixXd& J,
                           const MatrixXd& start) {
    const int r = static_cast<int>(g0.rows());
    if (r % 2 != 0) throw DimensionMismatch("m must be even-dimensional");
    ComplexModel model;
    model.n = r / 2;
    model.J = J;
    model.g0 = g0;
    model.basis.resize(r, model.n);

    int found = 0;
    for (int c = 0; c < start.cols() && found < model.n; ++c) {
        VectorXd v = start.col(c);
        const double scale = std::sqrt(v.dot(g0 * v));
        for (int k = 0; k < found; ++k) {
            const VectorXd e = model.basis.col(k);
            const cd z = model.herm_j(e, v);
            v -= z.real() * e + z.imag() * (J * e);
        }
        const double nrm = std::sqrt(std::max(0.0, v.dot(g0 * v)));
        if (nrm > 1e-8 * std::max(1.0, scale)) model.basis.col(found++) = v / nrm;
    }
    if (found != model.n)
        throw Error("PostconditionFailed",
                    "could not complete a complex-orthonormal basis of m");

    double defect = 0.0;
    for (int k = 0; k < model.n; ++k)
        for (int l = 0; l < model.n; ++l) {
            cd expect = (k == l) ? cd(1.0, 0.0) : cd(0.0, 0.0);
            defect = std::max(defect,
                              std::abs(model.herm_j(model.basis.col(k),
                                                    model.basis.col(l)) - expect));
        }
    if (defect > 1e-10)
        throw Error("PostconditionFailed", "complex basis is not orthonormal");
    return model;
}

FockSpace::FockSpace(ComplexModel model)
    : model_(std::move(model)), dim_(1 << model_.n) {}

FockOperator FockSpace::create(const VectorXd& x) const {
    if (x.size() != model_.basis.rows())
        throw DimensionMismatch("create argument must be an m-vector");
    const VectorXcd z = model_.complex_coords(x);
    FockOperator out = FockOperator::Zero(dim_, dim_);
    for (int k = 0; k < n(); ++k) {
        if (z[k] == cd(0.0, 0.0)) continue;
        for (unsigned mask = 0; mask < static_cast<unsigned>(dim_); ++mask) {
            if (mask & (1u << k)) continue;
            out(mask | (1u << k), mask) += z[k] * wedge_sign(mask, k);
        }
    }
    return out;
}

FockOperator FockSpace::annihilate(const VectorXd& x) const {
    if (x.size() != model_.basis.rows())
        throw DimensionMismatch("annihilate argument must be an m-vector");
    const VectorXcd z = model_.complex_coords(x);
    FockOperator out = FockOperator::Zero(dim_, dim_);
    for (int k = 0; k < n(); ++k) {
        if (z[k] == cd(0.0, 0.0)) continue;
        for (unsigned mask = 0; mask < static_cast<unsigned>(dim_); ++mask) {
            if (!(mask & (1u << k))) continue;
            out(mask & ~(1u << k), mask) +=
                std::conj(z[k]) * wedge_sign(mask & ~(1u << k), k);
        }
    }
    return out;
}

FockOperator FockSpace::kappa(const VectorXd& x) const {
    return cd(0.0, 1.0) * (annihilate(x) + create(x));
}

FockOperator FockSpace::lift_unitary(const MatrixXd& R, double tol) const {
    const MatrixXd& J = model_.J;
    const MatrixXd& g0 = model_.g0;
    const double scale = 1.0 + R.cwiseAbs().maxCoeff();
    if ((R * J - J * R).cwiseAbs().maxCoeff() > tol * scale ||
        (R.transpose() * g0 * R - g0).cwiseAbs().maxCoeff() > tol * scale * scale)
        throw NotUnitaryForJ("map is not unitary for (g0, J)");

    MatrixXcd u(n(), n());
    for (int k = 0; k < n(); ++k)
        for (int l = 0; l < n(); ++l)
            u(k, l) = model_.herm_j(model_.basis.col(k),
                                    VectorXd(R * model_.basis.col(l)));

    // Exterior powers: <e_I, rho(R) e_K> = det u[I, K] on equal degrees.
    FockOperator out = FockOperator::Zero(dim_, dim_);
    std::vector<int> rows, cols;
    for (unsigned ci = 0; ci < static_cast<unsigned>(dim_); ++ci) {
        cols.clear();
        for (int k = 0; k < n(); ++k)
            if (ci & (1u << k)) cols.push_back(k);
        for (unsigned ri = 0; ri < static_cast<unsigned>(dim_); ++ri) {
            if (std::popcount(ri) != std::popcount(ci)) continue;
            rows.clear();
            for (int k = 0; k < n(); ++k)
                if (ri & (1u << k)) rows.push_back(k);
            if (rows.empty()) {
                out(ri, ci) = 1.0;
                continue;
            }
            MatrixXcd minor(rows.size(), cols.size());
            for (size_t p = 0; p < rows.size(); ++p)
                for (size_t q = 0; q < cols.size(); ++q)
                    minor(p, q) = u(rows[p], cols[q]);
            out(ri, ci) = minor.determinant();
        }
    }
    return out;
}

FockOperator FockSpace::derivation_lift(const MatrixXd& L, double tol) const {
    const MatrixXd& J = model_.J;
    if ((L * J - J * L).cwiseAbs().maxCoeff() > tol * (1.0 + L.cwiseAbs().maxCoeff()))
        throw NotComplexLinear("derivation lift requires a J-commuting map");

    MatrixXcd a(n(), n());
    for (int k = 0; k < n(); ++k)
        for (int l = 0; l < n(); ++l)
            a(k, l) = model_.herm_j(model_.basis.col(k),
                                    VectorXd(L * model_.basis.col(l)));

    FockOperator out = FockOperator::Zero(dim_, dim_);
    for (unsigned mask = 0; mask < static_cast<unsigned>(dim_); ++mask) {
        for (int j = 0; j < n(); ++j) {
            if (!(mask & (1u << j))) continue;
            for (int k = 0; k < n(); ++k) {
                if (a(k, j) == cd(0.0, 0.0)) continue;
                if (k == j) {
                    out(mask, mask) += a(j, j);
                } else if (!(mask & (1u << k))) {
                    const unsigned target = (mask & ~(1u << j)) | (1u << k);
                    // Parity of basis elements strictly between j and k.
                    const int lo = std::min(j, k), hi = std::max(j, k);
                    const unsigned between =
                        (mask & ~(1u << j)) & ((1u << hi) - 1u) & ~((1u << (lo + 1)) - 1u);
                    const double sign = (std::popcount(between) % 2 == 0) ? 1.0 : -1.0;
                    out(target, mask) += sign * a(k, j);
                }
            }
        }
    }
    return out;
}

FockOperator FockSpace::lift_skew(const MatrixXd& L, double tol) const {
    const MatrixXd& J = model_.J;
    const MatrixXd& g0 = model_.g0;
    const double scale = 1.0 + L.cwiseAbs().maxCoeff();
    if ((L * J - J * L).cwiseAbs().maxCoeff() > tol * scale ||
        (L.transpose() * g0 + g0 * L).cwiseAbs().maxCoeff() > tol * scale * scale)
        throw NotSkewForJ("map is not in u(m_J)");
    return derivation_lift(L, tol);
}

FockOperator FockSpace::chirality(int orientation) const {
    FockOperator out = FockOperator::Identity(dim_, dim_);
    for (int k = 0; k < n(); ++k) {
        const VectorXd e = model_.basis.col(k);
        out = out * kappa(e) * kappa(VectorXd(model_.J * e));
    }
    const cd in = std::pow(cd(0.0, 1.0), n());
    out *= in * static_cast<double>(orientation >= 0 ? 1 : -1);
    return out;
}

FockSpace fock_space(const OrbitGeometry& geom, const WeightData& weights,
                     const std::string& metric) {
    const MatrixXd g0 = geom.metric_gram(metric);
    return FockSpace(complex_model(g0, geom.J, weights.ordered_basis));
}

}  // namespace coorbit
