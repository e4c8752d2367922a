#pragma once

#include <functional>
#include <vector>

#include "coorbit/dirac.hpp"

namespace coorbit {

/// Realization of a 3-dimensional algebra with [X_i, X_j] = c eps_{ijk} X_k
/// as 2x2 anti-Hermitian matrices X_k -> -(i c / 2) sigma_k, plus the Euler
/// chart x(phi, theta, psi) = exp(phi x3) exp(theta x1) exp(psi x3) built
/// from the unit-normalized generators x_k = -(i/2) sigma_k.
class Su2Realization {
public:
    explicit Su2Realization(const LieAlgebra& g);  // UnsupportedAlgebra if not eps-form

    double scale() const { return c_; }
    const Eigen::Matrix2cd& generator(int k) const { return gen_[k]; }

    Eigen::Matrix2cd embed(const VectorXd& coords) const;
    VectorXd coords(const Eigen::Matrix2cd& y) const;

    Eigen::Matrix2cd chart(double phi, double theta, double psi) const;
    // Angles with chart(angles) == x to machine precision.
    std::array<double, 3> euler_angles(const Eigen::Matrix2cd& x) const;

    // Ad_x(Y) = x Y x^{-1} in basis coordinates.
    VectorXd adjoint(const Eigen::Matrix2cd& x, const VectorXd& y) const;

private:
    double c_ = 1.0;
    std::array<Eigen::Matrix2cd, 3> gen_;
};

/// Quadrature grid over the group: trapezoid in the two periodic angles over
/// [0, 4pi) (double cover, weights halved) and Gauss-Legendre in theta.
struct Su2Grid {
    std::vector<double> phi, psi;
    std::vector<double> theta, theta_weight;
    double periodic_weight = 0.0;  // combined phi/psi weight incl. normalization

    static Su2Grid make(int n_periodic, int n_theta);
};

/// A tangent field given as a finite combination sum_i f_i X^_{k_i} of
/// fundamental vector fields with polynomial coefficients in the four real
/// entry-coordinates (Re a, Im a, Re b, Im b) of x = [[a, b], [-b*, a*]].
struct MatrixPolynomial {
    // term: coefficient * prod coords[var]^power
    struct Term {
        double coeff;
        std::array<int, 4> powers;
    };
    std::vector<Term> terms;

    double eval(const Eigen::Matrix2cd& x) const;
    static MatrixPolynomial constant(double v);
    static MatrixPolynomial random(int degree, unsigned seed);
};

struct FundamentalField {
    struct Piece {
        int basis_index;
        MatrixPolynomial coeff;
    };
    std::vector<Piece> pieces;

    // Value of the field at x, in m-coordinates (X^(x) = -P Ad_x^{-1} X).
    VectorXd eval(const Su2Realization& su2, const OrbitGeometry& geom,
                  const Eigen::Matrix2cd& x) const;
};

// Quadrature value of the integral of div(V) over the orbit for the
// Levi-Civita connection of the metric with Gram g0 on m.  The exact value
// is 0; the return measures quadrature + roundoff only.
double divergence_quadrature(const OrbitGeometry& geom, const MatrixXd& g0,
                             const FundamentalField& field,
                             const Su2Grid& grid);

/// Independent route to the block eigenvalues: Galerkin discretization of the
/// Dirac operator on explicit equivariant functions evaluated through the
/// Euler chart, with derivatives by central differences and inner products by
/// quadrature.
struct GalerkinResult {
    std::vector<std::complex<double>> eigenvalues;  // with V-multiplicity
    double equivariance_defect = 0.0;  // sampled bundle-condition defect
    double gram_defect = 0.0;          // || Gram - I/dim(V) ||
    bool hermitian = true;
};

GalerkinResult dirac_galerkin_oracle(const BlockContext& ctx, int two_j,
                                     const Su2Grid& grid, double fd_step = 1e-4);

}  // namespace coorbit
