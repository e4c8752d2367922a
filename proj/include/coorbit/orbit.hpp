#pragma once

#include <string>
#include <vector>

#include "coorbit/lie_algebra.hpp"

namespace coorbit {

/// A coadjoint-orbit datum: the functional mu and the element z with
/// kil(X, z) = mu(X) for all X.
struct OrbitDatum {
    VectorXd mu;
    VectorXd z;
};

// Solves kil * z = mu.  Throws ZeroFunctional when mu = 0.
OrbitDatum solve_z(const LieAlgebra& g, const VectorXd& mu);
// Same datum from z directly (mu = kil * z).
OrbitDatum datum_from_z(const LieAlgebra& g, const VectorXd& z);

// Reads {"mu": [...]} or {"z": [...]} against the algebra basis.
OrbitDatum datum_from_json_file(const LieAlgebra& g, const std::string& path);
OrbitDatum datum_from_json_text(const LieAlgebra& g, const std::string& text);

// Stabilizer subalgebra (kernel of ad_z) and its kil-orthogonal complement.
// Kernel detection thresholds singular values at 1e-9 relative to the
// largest.
std::pair<Subspace, Subspace> stabilizer_split(const LieAlgebra& g,
                                               const OrbitDatum& datum);

/// Structures on m induced by the orbit, all expressed in the kil-orthonormal
/// basis `m_sub.basis` (so the kil Gram on m is the identity):
///   gamma      ad_z restricted to m (kil-skew, invertible)
///   gamma_abs  positive part of gamma, from gamma = gamma_abs * J
///   J          orthogonal complex structure, J^2 = -I
///   omega      symplectic form, omega(a,b) = kil(gamma e_a, e_b)
///   g_metric   Riemannian inner product, g(a,b) = kil(gamma_abs e_a, e_b)
struct OrbitGeometry {
    const LieAlgebra* algebra = nullptr;
    OrbitDatum datum;
    Subspace k_sub, m_sub;
    MatrixXd gamma, gamma_abs, J, omega, g_metric;

    int r() const { return static_cast<int>(gamma.rows()); }

    VectorXd mcoords(const VectorXd& v) const {
        return m_sub.coords(*algebra, v);
    }
    VectorXd membed(const VectorXd& c) const { return m_sub.embed(c); }
    VectorXd kcoords(const VectorXd& v) const {
        return k_sub.coords(*algebra, v);
    }

    // Bracket of two m-vectors, projected back to m-coordinates.
    VectorXd mbracket(const VectorXd& x, const VectorXd& y) const {
        return mcoords(algebra->bracket(membed(x), membed(y)));
    }
    // Bracket of two m-vectors as an ambient algebra element (not projected).
    VectorXd gbracket(const VectorXd& x, const VectorXd& y) const {
        return algebra->bracket(membed(x), membed(y));
    }

    // Matrix of ad_Z restricted to m, Z given in ambient coordinates.
    MatrixXd ad_on_m(const VectorXd& z) const;

    // Gram matrix of the requested invariant metric on m.
    // "kahler" -> g_metric, "killing" -> identity.
    MatrixXd metric_gram(const std::string& which) const;
};

OrbitGeometry kahler_structure(const LieAlgebra& g, const OrbitDatum& datum,
                               const Subspace& k_sub, const Subspace& m_sub);
OrbitGeometry kahler_structure(const LieAlgebra& g, const OrbitDatum& datum);

/// Spectral decomposition of gamma_abs: distinct weights alpha(z) with
/// orthogonal projectors P_alpha summing to the identity on m, each commuting
/// with J, and gamma_abs = sum alpha(z) P_alpha.
struct WeightData {
    std::vector<double> weights;           // ascending, all > 0
    std::vector<MatrixXd> projectors;      // r x r, in m-coordinates
    std::vector<int> subspace_dims;        // even, sum = r
    MatrixXd ordered_basis;                // r x r, columns grouped by weight

    int count() const { return static_cast<int>(weights.size()); }
    // Index of the weight equal to `value` at relative tolerance, or -1.
    int find(double value, double rel_tol = 1e-8) const;
};

WeightData weight_decomposition(const OrbitGeometry& geom,
                                double cluster_rel_tol = 1e-8);

}  // namespace coorbit
