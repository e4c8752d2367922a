#pragma once

#include <string>
#include <vector>

#include "coorbit/orbit.hpp"

namespace coorbit {

/// A G-invariant connection on the orbit, encoded by the bilinear map
/// ell: m x m -> m giving its deviation from the canonical connection at the
/// identity coset.  ell[a].col(b) holds ell(e_a, e_b) in m-coordinates.
struct ConnectionMap {
    std::string label;
    std::vector<MatrixXd> ell;

    int r() const { return static_cast<int>(ell.size()); }

    VectorXd apply(const VectorXd& x, const VectorXd& y) const;
    // Matrix of Y -> ell(X, Y).
    MatrixXd endomorphism(const VectorXd& x) const;

    // Max deviation of Y -> ell(X,Y) from g0-skewness over basis X.
    double compatibility_defect(const MatrixXd& g0) const;
    // Max over basis pairs of || J ell(X,Y) - ell(X, JY) ||.
    double j_commutation_defect(const MatrixXd& J) const;
};

// The individual correction maps.  All results are in m-coordinates.
VectorXd lct(const OrbitGeometry& geom, const VectorXd& x, const VectorXd& y);
VectorXd ls_general(const OrbitGeometry& geom, const MatrixXd& S,
                    const VectorXd& x, const VectorXd& y);
// Dense solve of 2 g0(Phi(X,Y), Z) = g0(X, P[Z,Y]) + g0(P[Z,X], Y); the
// independent route to the Levi-Civita correction for any invariant metric.
VectorXd koszul_solve(const OrbitGeometry& geom, const MatrixXd& g0,
                      const VectorXd& x, const VectorXd& y);
// Weight-space formula for the Kahler Levi-Civita correction.
VectorXd ldiamond(const OrbitGeometry& geom, const WeightData& weights,
                  const VectorXd& x, const VectorXd& y);

// Tensor assemblies of the maps above.
ConnectionMap zero_connection(int r);                                // canonical
ConnectionMap lct_connection(const OrbitGeometry& geom);             // natural torsion-free
ConnectionMap levi_civita_connection(const OrbitGeometry& geom,
                                     const MatrixXd& S);             // lct + ls_general(S)
ConnectionMap coadjoint_connection(const OrbitGeometry& geom,
                                   const WeightData& weights);       // lct + ldiamond
ConnectionMap koszul_connection(const OrbitGeometry& geom,
                                const MatrixXd& g0);                 // lct + koszul_solve

// label in {canonical, natural-torsion-free, levi-civita, coadjoint-levi-civita}.
ConnectionMap full_connection(const std::string& label,
                              const OrbitGeometry& geom,
                              const WeightData& weights);

// Custom tensor file {"r": r, "ell": [[a,b,c,value], ...]}.
ConnectionMap connection_from_json_file(const std::string& path, int r);
ConnectionMap connection_from_json_text(const std::string& text, int r);
std::string connection_to_json_text(const ConnectionMap& conn);

// Negative control: the Kahler Levi-Civita tensor polluted by a seeded term
// that commutes with J (so the spinor lift exists) but is neither g0-skew nor
// K-equivariant.  Its trace criterion is nonzero and its Dirac matrices fail
// Hermiticity.
ConnectionMap adversarial_connection(const OrbitGeometry& geom,
                                     const WeightData& weights, unsigned seed,
                                     double eps);

/// Torsion at the identity coset: t(X,Y) = -P[X,Y] + ell(X,Y) - ell(Y,X).
struct TorsionTensor {
    std::vector<MatrixXd> t;
    VectorXd apply(const VectorXd& x, const VectorXd& y) const;
    double max_norm() const;
    double antisymmetry_defect() const;
};

TorsionTensor torsion(const OrbitGeometry& geom, const ConnectionMap& conn);

// Component u is sum_a g0(t(e_u, f_a), f_a) over a g0-orthonormal basis
// {f_a}; all components vanish exactly when the Dirac operator of the
// connection is formally self-adjoint.  `frame` overrides the default
// orthonormal basis (columns must be g0-orthonormal).
VectorXd trace_criterion(const OrbitGeometry& geom, const ConnectionMap& conn,
                         const MatrixXd& g0);
VectorXd trace_criterion(const OrbitGeometry& geom, const ConnectionMap& conn,
                         const MatrixXd& g0, const MatrixXd& frame);

/// || sum_a ell(f_a, f_a) ||_{g0} together with the same sum evaluated
/// through the fundamental-field biframe (X_p = S^{1/2} f_p paired with
/// S^{-1/2} f_p, fundamental values X^(e) = -PX).  The two sums are negatives
/// of each other; `agreement_defect` is || frame_sum + fundamental_sum ||.
struct FrameSumReport {
    double norm;
    double agreement_defect;
};

FrameSumReport frame_sum_check(const OrbitGeometry& geom,
                               const ConnectionMap& conn, const MatrixXd& g0);

/// Defects of the weight-space bracket decomposition identities for
/// single-weight inputs X in m_alpha, Y in m_beta:
///   minus := [X,Y] - [JX,JY]   lies in m_{alpha+beta}
///   plus  := [X,Y] + [JX,JY]   lies in k (alpha = beta) or m_{|alpha-beta|}
///   J minus = [JX,Y] + [X,JY]
///   alpha != beta:  J plus = sign(alpha-beta) ([JX,Y] - [X,JY])
///   alpha == beta:  J P plus = 0
struct BracketDecompositionReport {
    double minus_membership;
    double plus_membership;
    double j_minus_identity;
    double j_plus_identity;   // only one of the two J-plus rows applies
    double max_defect;
};

BracketDecompositionReport bracket_decomposition_check(
    const OrbitGeometry& geom, const WeightData& weights, int alpha_index,
    const VectorXd& x, int beta_index, const VectorXd& y);

// Columns of a g0-orthonormal basis of m (symmetric inverse square root).
MatrixXd orthonormal_frame(const MatrixXd& g0);

}  // namespace coorbit
