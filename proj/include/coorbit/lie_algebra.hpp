#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "coorbit/errors.hpp"

namespace coorbit {

using Eigen::MatrixXd;
using Eigen::MatrixXcd;
using Eigen::VectorXd;
using Eigen::VectorXcd;

/// A compact semisimple Lie algebra given by real structure constants in a
/// fixed basis.  `kil` is the negative of the Killing form, which is
/// positive-definite here; it is the inner product used everywhere below.
class LieAlgebra {
public:
    // Builds from the full antisymmetric structure tensor c[i][j][k],
    // validating antisymmetry, Jacobi, and definiteness of kil.
    static LieAlgebra from_structure_tensor(std::vector<MatrixXd> ad_matrices);

    // Built-in su(n) in the anti-Hermitian matrix basis: for each pair j<k the
    // "real" generator E_jk - E_kj and the "imaginary" generator
    // i(E_jk + E_kj), then the diagonal generators i(E_ll - E_{l+1,l+1}).
    static LieAlgebra su(int n);

    // {"dim": n, "c": [[i,j,k,value], ...]}, zero-based indices, entries with
    // i<j, antisymmetric completion automatic.  Conflicting or diagonal
    // entries raise AntisymmetryViolation.
    static LieAlgebra from_json_file(const std::string& path);
    static LieAlgebra from_json_text(const std::string& text);

    int dim() const { return dim_; }

    double c(int i, int j, int k) const { return ad_[i](k, j); }
    const MatrixXd& ad(int i) const { return ad_[i]; }
    const MatrixXd& kil() const { return kil_; }
    const MatrixXd& kil_sqrt() const { return kil_sqrt_; }
    const MatrixXd& kil_sqrt_inv() const { return kil_sqrt_inv_; }

    VectorXd bracket(const VectorXd& a, const VectorXd& b) const;
    MatrixXd ad_of(const VectorXd& z) const;

    // exp(t ad_Z); kil-orthogonal for all t.
    MatrixXd ad_exp(const VectorXd& z, double t) const;

    double kil_pair(const VectorXd& a, const VectorXd& b) const {
        return a.dot(kil_ * b);
    }

    // The anti-Hermitian n x n matrices of the defining basis when built via
    // su(n); empty otherwise.
    const std::vector<MatrixXcd>& defining_matrices() const { return defining_; }

private:
    LieAlgebra() = default;
    void validate() const;
    void finish_construction();

    int dim_ = 0;
    std::vector<MatrixXd> ad_;
    MatrixXd kil_, kil_sqrt_, kil_sqrt_inv_;
    std::vector<MatrixXcd> defining_;
};

/// A subspace of the algebra carrying a kil-orthonormal basis.  `projector`
/// is the kil-orthogonal projection of the ambient algebra onto the subspace.
struct Subspace {
    MatrixXd basis;      // dim x r, kil-orthonormal columns
    MatrixXd projector;  // dim x dim

    int rank() const { return static_cast<int>(basis.cols()); }
    VectorXd coords(const LieAlgebra& g, const VectorXd& v) const {
        return basis.transpose() * (g.kil() * v);
    }
    VectorXd embed(const VectorXd& c) const { return basis * c; }
};

// Dense matrix exponential (scaling and squaring, via Eigen).
MatrixXd expm(const MatrixXd& a);
MatrixXcd expm(const MatrixXcd& a);

}  // namespace coorbit
