#include "coorbit/lie_algebra.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace coorbit {

namespace {

double structure_scale(const std::vector<MatrixXd>& ad) {
    double m = 0.0;
    for (const auto& a : ad) m = std::max(m, a.cwiseAbs().maxCoeff());
    return std::max(1.0, m * m);
}

}  // namespace

MatrixXd expm(const MatrixXd& a) { return a.exp(); }
MatrixXcd expm(const MatrixXcd& a) { return a.exp(); }

LieAlgebra LieAlgebra::from_structure_tensor(std::vector<MatrixXd> ad_matrices) {
    LieAlgebra g;
    g.dim_ = static_cast<int>(ad_matrices.size());
    g.ad_ = std::move(ad_matrices);
    for (const auto& a : g.ad_) {
        if (a.rows() != g.dim_ || a.cols() != g.dim_)
            throw DimensionMismatch("structure tensor slice has wrong shape");
    }
    g.finish_construction();
    return g;
}

void LieAlgebra::finish_construction() {
    const int d = dim_;
    const double scale = structure_scale(ad_);

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                if (std::abs(c(i, j, k) + c(j, i, k)) > 1e-12 * scale)
                    throw AntisymmetryViolation("c[i][j][k] != -c[j][i][k] at (" +
                                                std::to_string(i) + "," +
                                                std::to_string(j) + "," +
                                                std::to_string(k) + ")");

    // Jacobi in operator form: ad_[X_i, X_j] = [ad_i, ad_j].
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            MatrixXd lhs = MatrixXd::Zero(d, d);
            for (int k = 0; k < d; ++k) lhs += c(i, j, k) * ad_[k];
            const MatrixXd rhs = ad_[i] * ad_[j] - ad_[j] * ad_[i];
            if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-10 * scale)
                throw JacobiViolation("structure constants fail the Jacobi identity");
        }
    }

    kil_.resize(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
            kil_(i, j) = kil_(j, i) = -(ad_[i] * ad_[j]).trace();

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(kil_);
    const double emax = es.eigenvalues().maxCoeff();
    if (emax <= 0.0 || es.eigenvalues().minCoeff() <= 1e-10 * emax)
        throw DegenerateKilling("negative Killing form is not positive-definite");
    kil_sqrt_ = es.operatorSqrt();
    kil_sqrt_inv_ = es.operatorInverseSqrt();

    validate();
}

void LieAlgebra::validate() const {
    const double scale = structure_scale(ad_);
    for (int i = 0; i < dim_; ++i) {
        const MatrixXd defect = ad_[i].transpose() * kil_ + kil_ * ad_[i];
        if (defect.cwiseAbs().maxCoeff() > 1e-9 * scale * kil_.norm())
            throw JacobiViolation("ad is not kil-skew-adjoint");
    }
}

VectorXd LieAlgebra::bracket(const VectorXd& a, const VectorXd& b) const {
    if (a.size() != dim_ || b.size() != dim_)
        throw DimensionMismatch("bracket operands must have algebra dimension");
    VectorXd out = VectorXd::Zero(dim_);
    for (int i = 0; i < dim_; ++i)
        if (a[i] != 0.0) out += a[i] * (ad_[i] * b);
    return out;
}

MatrixXd LieAlgebra::ad_of(const VectorXd& z) const {
    if (z.size() != dim_)
        throw DimensionMismatch("ad argument must have algebra dimension");
    MatrixXd out = MatrixXd::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        if (z[i] != 0.0) out += z[i] * ad_[i];
    return out;
}

MatrixXd LieAlgebra::ad_exp(const VectorXd& z, double t) const {
    return expm(MatrixXd(t * ad_of(z)));
}

LieAlgebra LieAlgebra::su(int n) {
    if (n < 2) throw UnsupportedAlgebra("su(n) requires n >= 2");
    using cd = std::complex<double>;
    const cd I(0.0, 1.0);
    std::vector<MatrixXcd> basis;
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            MatrixXcd a = MatrixXcd::Zero(n, n);
            a(j, k) = 1.0;
            a(k, j) = -1.0;
            basis.push_back(a);
            MatrixXcd b = MatrixXcd::Zero(n, n);
            b(j, k) = I;
            b(k, j) = I;
            basis.push_back(b);
        }
    }
    for (int l = 0; l + 1 < n; ++l) {
        MatrixXcd d = MatrixXcd::Zero(n, n);
        d(l, l) = I;
        d(l + 1, l + 1) = -I;
        basis.push_back(d);
    }
    const int dim = static_cast<int>(basis.size());

    // Coordinates through the real trace pairing <A,B> = Re tr(A^* B).
    MatrixXd gram(dim, dim);
    for (int p = 0; p < dim; ++p)
        for (int q = 0; q < dim; ++q)
            gram(p, q) = (basis[p].adjoint() * basis[q]).trace().real();
    Eigen::LDLT<MatrixXd> gram_solver(gram);

    std::vector<MatrixXd> ad(dim, MatrixXd::Zero(dim, dim));
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const MatrixXcd br = basis[i] * basis[j] - basis[j] * basis[i];
            VectorXd rhs(dim);
            for (int p = 0; p < dim; ++p)
                rhs[p] = (basis[p].adjoint() * br).trace().real();
            ad[i].col(j) = gram_solver.solve(rhs);
        }
    }

    LieAlgebra g = from_structure_tensor(std::move(ad));
    g.defining_ = std::move(basis);
    return g;
}

LieAlgebra LieAlgebra::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw IoError(std::string("structure table is not valid JSON: ") + e.what());
    }
    if (!j.contains("dim") || !j.contains("c"))
        throw IoError("structure table needs fields \"dim\" and \"c\"");
    const int d = j["dim"].get<int>();
    if (d < 1) throw IoError("structure table dim must be positive");

    std::vector<MatrixXd> ad(d, MatrixXd::Zero(d, d));
    std::vector<std::vector<std::vector<bool>>> seen(
        d, std::vector<std::vector<bool>>(d, std::vector<bool>(d, false)));
    for (const auto& entry : j["c"]) {
        if (!entry.is_array() || entry.size() != 4)
            throw IoError("structure entries must be [i, j, k, value]");
        const int i = entry[0].get<int>(), jj = entry[1].get<int>(),
                  k = entry[2].get<int>();
        const double v = entry[3].get<double>();
        if (i < 0 || i >= d || jj < 0 || jj >= d || k < 0 || k >= d)
            throw IoError("structure entry index out of range");
        if (i == jj && v != 0.0)
            throw AntisymmetryViolation("nonzero c[i][i][k] entry");
        if (seen[i][jj][k] && ad[i](k, jj) != v)
            throw AntisymmetryViolation("conflicting duplicate structure entry");
        if (seen[jj][i][k] && ad[jj](k, i) != -v)
            throw AntisymmetryViolation("entry contradicts antisymmetric completion");
        ad[i](k, jj) = v;
        ad[jj](k, i) = -v;
        seen[i][jj][k] = seen[jj][i][k] = true;
    }
    return from_structure_tensor(std::move(ad));
}

LieAlgebra LieAlgebra::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open structure table " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

}  // namespace coorbit
