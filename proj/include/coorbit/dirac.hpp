#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coorbit/connection.hpp"
#include "coorbit/fock.hpp"

namespace coorbit {

/// An irreducible unitary representation by anti-Hermitian generator
/// matrices, one per algebra basis element.
struct IrrepData {
    std::string label;
    int dim = 0;
    std::vector<MatrixXcd> generators;

    MatrixXcd of(const VectorXd& x) const;
    // Commutator and anti-Hermiticity defects against the algebra.
    double validation_defect(const LieAlgebra& g) const;
};

// Spin-j ladder construction for algebras with c[i][j][k] = c eps_{ijk}
// structure (throws UnsupportedAlgebra otherwise); dim = two_j + 1.
IrrepData su2_irrep(const LieAlgebra& g, int two_j);
// Adjoint representation, orthonormalized so generators are anti-Hermitian.
IrrepData adjoint_irrep(const LieAlgebra& g);
// Defining representation of a built-in su(n) algebra.
IrrepData sun_defining_irrep(const LieAlgebra& g);

// {"label": str, "dim": d, "generators": [d x d matrices as [re, im] pairs]}.
IrrepData irrep_from_json_file(const LieAlgebra& g, const std::string& path);
IrrepData irrep_from_json_text(const LieAlgebra& g, const std::string& text);
std::string irrep_to_json_text(const IrrepData& irrep);

/// A character of the stabilizer at the Lie-algebra level: dchi(Z) =
/// i weight(Z) against the computed kil-orthonormal basis of k.
struct CharacterData {
    VectorXd weight;

    // Defect of the requirement that weight vanish on [k,k].
    double commutator_defect(const LieAlgebra& g, const Subspace& k_sub) const;
};

/// Per-irrep data of the Dirac operator on the K-invariant homomorphism
/// space Hom_K(V, S otimes chi), realized inside V* tensor S (vectorization
/// kron(V*, S)).
struct DiracBlock {
    std::string irrep_label;
    int irrep_dim = 0;
    MatrixXcd inv_basis;   // (d * 2^n) x s, orthonormal columns
    MatrixXcd d_matrix;    // s x s
    MatrixXcd chirality;   // s x s restriction of I (x) kappa(gamma)
    double hermiticity_defect = 0.0;
    double chirality_anticommutator = 0.0;
    double preservation_defect = 0.0;
    std::vector<std::complex<double>> eigenvalues;
    int multiplicity = 0;  // each eigenvalue carries this multiplicity

    int size() const { return static_cast<int>(d_matrix.rows()); }
    bool hermitian(double tol = 1e-8) const { return hermiticity_defect <= tol; }
};

/// Shared per-orbit context for block assembly.
struct BlockContext {
    const OrbitGeometry* geom = nullptr;
    const FockSpace* fock = nullptr;
    ConnectionMap conn;
    MatrixXd g0;
    CharacterData character;
    int orientation = +1;

    // g0-orthonormal frame columns, fixed once per context.
    MatrixXd frame;
};

BlockContext make_block_context(const OrbitGeometry& geom,
                                const WeightData& weights,
                                const FockSpace& fock,
                                const ConnectionMap& conn, const MatrixXd& g0,
                                const CharacterData& character,
                                int orientation = +1);

// Columns span the joint kernel of the equivariance operators
//   -dpi(Z)^T (x) I + I (x) sigma(ad_Z|m) + i weight(Z) I,  Z over the k basis.
// May be empty.
MatrixXcd invariant_subspace(const BlockContext& ctx, const IrrepData& irrep,
                             double rank_tol = 1e-9);

// The Dirac operator on V* (x) S:
//   sum_a [ -dpi(f_a)^T (x) kappa(f_a) + I (x) kappa(f_a) sigma(ell(f_a, .)) ].
MatrixXcd big_dirac_matrix(const BlockContext& ctx, const IrrepData& irrep);
// The ell-dependent part alone (the operator M).
MatrixXcd big_m_matrix(const BlockContext& ctx, const IrrepData& irrep);

// Restricts the big matrix to the invariant subspace after verifying the
// subspace is preserved (defect <= preserve_tol, else SubspaceNotPreserved).
DiracBlock block_operator(const BlockContext& ctx, const IrrepData& irrep,
                          double preserve_tol = 1e-8);
DiracBlock block_operator(const BlockContext& ctx, const IrrepData& irrep,
                          const MatrixXcd& inv_basis,
                          double preserve_tol = 1e-8);

// Block of D - (1/2)(M - M*); Hermitian for every connection.
DiracBlock modified_dirac(const BlockContext& ctx, const IrrepData& irrep,
                          double preserve_tol = 1e-8);

/// Aggregated spectrum over blocks.
struct SpectrumRow {
    double eigenvalue_re = 0.0;
    double eigenvalue_im = 0.0;
    int multiplicity = 0;
    std::string irrep_label;
    int block_dim = 0;
};

struct SpectrumResult {
    std::vector<SpectrumRow> rows;
    std::vector<DiracBlock> blocks;
    bool non_hermitian = false;   // some block failed the Hermiticity test
    bool empty_warning = false;   // every invariant subspace was empty

    // Largest |lambda + mu| mismatch when matching the spectrum against its
    // negation with multiplicities (Hermitian runs only).
    double negation_symmetry_defect() const;
};

SpectrumResult spectrum(const BlockContext& ctx,
                        const std::vector<IrrepData>& irreps,
                        bool modified = false, double herm_tol = 1e-8);

std::string spectrum_to_csv(const SpectrumResult& result);

// Character weights that make Hom_K(V, S otimes chi) nonempty, from the joint
// spectrum of the equivariance operators with the weight term omitted.
std::vector<VectorXd> matching_characters(const BlockContext& ctx,
                                          const IrrepData& irrep,
                                          double merge_tol = 1e-8);

}  // namespace coorbit
