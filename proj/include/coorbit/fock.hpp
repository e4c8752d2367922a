#pragma once

#include <vector>

#include "coorbit/orbit.hpp"

namespace coorbit {

using FockOperator = MatrixXcd;

/// m viewed as a complex n-dimensional space through J, with the sesquilinear
/// inner product <X,Y>_J = g0(X,Y) + i g0(JX,Y) (linear in the second slot).
/// `basis` columns e_1..e_n are <.,.>_J-orthonormal; their real span together
/// with J e_k recovers m.
struct ComplexModel {
    int n = 0;
    MatrixXd basis;  // r x n
    MatrixXd J;      // r x r
    MatrixXd g0;     // r x r

    std::complex<double> herm_j(const VectorXd& x, const VectorXd& y) const {
        return {x.dot(g0 * y), (J * x).dot(g0 * y)};
    }
    // Complex coordinates of a real m-vector against the basis.
    VectorXcd complex_coords(const VectorXd& x) const;
    // (a+bi) . e_k as a real m-vector.
    VectorXd real_vector(const VectorXcd& z) const;
};

// Deterministic complex Gram-Schmidt seeded from `start` columns (typically
// the weight-ordered real basis of m).
ComplexModel complex_model(const MatrixXd& g0, const MatrixXd& J,
                           const MatrixXd& start);

/// The 2^n-dimensional fermionic Fock space over the complex model, with the
/// Clifford representation kappa(X) = i(a(X) + a'(X)) and the lifts of
/// unitary / skew complex-linear maps on m.  Basis vectors are indexed by
/// subsets of {1..n} as bitmasks, wedge factors ascending.
class FockSpace {
public:
    explicit FockSpace(ComplexModel model);

    const ComplexModel& model() const { return model_; }
    int n() const { return model_.n; }
    int dim() const { return dim_; }

    FockOperator annihilate(const VectorXd& x) const;  // conjugate-linear in x
    FockOperator create(const VectorXd& x) const;      // linear in x
    FockOperator kappa(const VectorXd& x) const;

    // Exterior-power action of R in U(m_J): requires RJ = JR and R
    // g0-orthogonal (else NotUnitaryForJ).
    FockOperator lift_unitary(const MatrixXd& R, double tol = 1e-9) const;

    // Derivation extension of L in u(m_J): requires LJ = JL and L g0-skew
    // (else NotSkewForJ).
    FockOperator lift_skew(const MatrixXd& L, double tol = 1e-9) const;

    // Derivation extension of any complex-linear map on m (no skewness
    // requirement); used for connection lifts, including non-compatible ones.
    FockOperator derivation_lift(const MatrixXd& L, double tol = 1e-9) const;

    // kappa of the chirality element for the orientation in which the ordered
    // real basis (e_1, J e_1, ..., e_n, J e_n) is positive.
    FockOperator chirality(int orientation = +1) const;

private:
    ComplexModel model_;
    int dim_ = 0;
};

// Fock model over the orbit for the chosen metric ("kahler" or "killing"),
// complex basis seeded from the weight-ordered basis of m.
FockSpace fock_space(const OrbitGeometry& geom, const WeightData& weights,
                     const std::string& metric = "kahler");

}  // namespace coorbit
