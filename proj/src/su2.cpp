#include "coorbit/su2.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

namespace coorbit {

namespace {

using cd = std::complex<double>;
using Eigen::Matrix2cd;

constexpr double pi = std::numbers::pi;

Matrix2cd pauli(int k) {
    Matrix2cd s;
    switch (k) {
        case 0: s << 0, 1, 1, 0; break;
        case 1: s << 0, cd(0, -1), cd(0, 1), 0; break;
        default: s << 1, 0, 0, -1; break;
    }
    return s;
}

// exp of an anti-Hermitian traceless 2x2 matrix, closed form.
Matrix2cd exp_su2(const Matrix2cd& m) {
    // m = -(i/2) theta (n . sigma) for a unit n; det m = (theta/2)^2.
    const cd det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double half = std::sqrt(std::max(0.0, det.real()));
    if (half < 1e-300) return Matrix2cd::Identity() + m;
    return std::cos(half) * Matrix2cd::Identity() + (std::sin(half) / half) * m;
}

}  // namespace

Su2Realization::Su2Realization(const LieAlgebra& g) {
    if (g.dim() != 3)
        throw UnsupportedAlgebra("quadrature requires a 3-dimensional algebra");
    c_ = g.c(0, 1, 2);
    if (c_ == 0.0)
        throw UnsupportedAlgebra("structure constants are not proportional to eps_ijk");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                const int eps = ((i + 1) % 3 == j && (j + 1) % 3 == k) ? 1
                                : ((j + 1) % 3 == i && (i + 1) % 3 == k) ? -1
                                                                         : 0;
                if (std::abs(g.c(i, j, k) - c_ * eps) > 1e-10 * std::abs(c_))
                    throw UnsupportedAlgebra(
                        "structure constants are not proportional to eps_ijk");
            }
    for (int k = 0; k < 3; ++k) gen_[k] = cd(0.0, -0.5 * c_) * pauli(k);
}

Matrix2cd Su2Realization::embed(const VectorXd& coords) const {
    Matrix2cd out = Matrix2cd::Zero();
    for (int k = 0; k < 3; ++k) out += coords[k] * gen_[k];
    return out;
}

VectorXd Su2Realization::coords(const Matrix2cd& y) const {
    // tr(gen_j gen_k) = -(c^2/2) delta_jk.
    VectorXd out(3);
    for (int k = 0; k < 3; ++k)
        out[k] = -2.0 / (c_ * c_) * (gen_[k] * y).trace().real();
    return out;
}

Matrix2cd Su2Realization::chart(double phi, double theta, double psi) const {
    const cd e_phi = std::exp(cd(0.0, -0.5 * phi));
    const cd e_psi = std::exp(cd(0.0, -0.5 * psi));
    const double ch = std::cos(0.5 * theta), sh = std::sin(0.5 * theta);
    Matrix2cd mid;
    mid << ch, cd(0.0, -sh), cd(0.0, -sh), ch;
    Matrix2cd left = Matrix2cd::Zero(), right = Matrix2cd::Zero();
    left(0, 0) = e_phi;
    left(1, 1) = std::conj(e_phi);
    right(0, 0) = e_psi;
    right(1, 1) = std::conj(e_psi);
    return left * mid * right;
}

std::array<double, 3> Su2Realization::euler_angles(const Matrix2cd& x) const {
    const cd a = x(0, 0), b = x(0, 1);
    const double theta = 2.0 * std::atan2(std::abs(b), std::abs(a));
    double phi = 0.0, psi = 0.0;
    if (std::abs(b) < 1e-14) {
        phi = -2.0 * std::arg(a);
    } else if (std::abs(a) < 1e-14) {
        phi = -2.0 * (std::arg(b) + 0.5 * pi);
    } else {
        const double s1 = std::arg(a);             // -(phi+psi)/2
        const double s2 = std::arg(b) + 0.5 * pi;  // -(phi-psi)/2
        phi = -(s1 + s2);
        psi = s2 - s1;
    }
    if ((chart(phi, theta, psi) - x).cwiseAbs().maxCoeff() >
        (chart(phi + 2.0 * pi, theta, psi) - x).cwiseAbs().maxCoeff())
        phi += 2.0 * pi;
    if ((chart(phi, theta, psi) - x).cwiseAbs().maxCoeff() > 1e-9)
        throw Error("PostconditionFailed", "Euler angle extraction failed");
    return {phi, theta, psi};
}

VectorXd Su2Realization::adjoint(const Matrix2cd& x, const VectorXd& y) const {
    return coords(x * embed(y) * x.adjoint());
}

Su2Grid Su2Grid::make(int n_periodic, int n_theta) {
    Su2Grid grid;
    for (int i = 0; i < n_periodic; ++i) {
        grid.phi.push_back(4.0 * pi * i / n_periodic);
        grid.psi.push_back(4.0 * pi * i / n_periodic);
    }
    // Gauss-Legendre nodes on [0, pi] by Newton iteration on P_n.
    const int n = n_theta;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1,1] -> [0,pi]; weight includes sin(theta) and the half-width.
        const double theta = 0.5 * pi * (x + 1.0);
        grid.theta.push_back(theta);
        grid.theta_weight.push_back(0.5 * pi * w * std::sin(theta));
    }
    // Haar normalization over the double cover: (1/32 pi^2) dphi dtheta dpsi,
    // with dphi = dpsi = 4pi/N; note sum_i theta_weight approximates
    // int_0^pi sin = 2, so total mass is 1.
    grid.periodic_weight =
        (4.0 * pi / n_periodic) * (4.0 * pi / n_periodic) / (32.0 * pi * pi);
    return grid;
}

double MatrixPolynomial::eval(const Matrix2cd& x) const {
    const std::array<double, 4> coords{x(0, 0).real(), x(0, 0).imag(),
                                       x(0, 1).real(), x(0, 1).imag()};
    double out = 0.0;
    for (const auto& term : terms) {
        double v = term.coeff;
        for (int i = 0; i < 4; ++i)
            for (int p = 0; p < term.powers[i]; ++p) v *= coords[i];
        out += v;
    }
    return out;
}

MatrixPolynomial MatrixPolynomial::constant(double v) {
    MatrixPolynomial p;
    p.terms.push_back({v, {0, 0, 0, 0}});
    return p;
}

MatrixPolynomial MatrixPolynomial::random(int degree, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> var(0, 3);
    MatrixPolynomial p;
    for (int d = 0; d <= degree; ++d) {
        Term t{coeff(rng), {0, 0, 0, 0}};
        for (int k = 0; k < d; ++k) t.powers[var(rng)] += 1;
        p.terms.push_back(t);
    }
    return p;
}

VectorXd FundamentalField::eval(const Su2Realization& su2,
                                const OrbitGeometry& geom,
                                const Eigen::Matrix2cd& x) const {
    VectorXd out = VectorXd::Zero(geom.r());
    const int d = geom.algebra->dim();
    for (const auto& piece : pieces) {
        VectorXd basis_vec = VectorXd::Zero(d);
        basis_vec[piece.basis_index] = 1.0;
        const VectorXd fundamental =
            -geom.mcoords(su2.adjoint(x.adjoint(), basis_vec));
        out += piece.coeff.eval(x) * fundamental;
    }
    return out;
}

double divergence_quadrature(const OrbitGeometry& geom, const MatrixXd& g0,
                             const FundamentalField& field, const Su2Grid& grid) {
    const LieAlgebra& g = *geom.algebra;
    const Su2Realization su2(g);
    const ConnectionMap conn = levi_civita_connection(geom, g0);
    const double h = 1e-5;

    // Kil-orthonormal frame of the full algebra.
    const MatrixXd frame = g.kil_sqrt_inv();

    double total = 0.0;
    for (double phi : grid.phi) {
        for (size_t it = 0; it < grid.theta.size(); ++it) {
            for (double psi : grid.psi) {
                const Matrix2cd x = su2.chart(phi, grid.theta[it], psi);
                const VectorXd vx = field.eval(su2, geom, x);
                double div = 0.0;
                for (int j = 0; j < g.dim(); ++j) {
                    const VectorXd xj = frame.col(j);
                    const VectorXd wj = -geom.mcoords(su2.adjoint(x.adjoint(), xj));
                    if (wj.norm() < 1e-14) continue;
                    const Matrix2cd step = exp_su2(su2.embed(geom.membed(h * wj)));
                    const VectorXd vp = field.eval(su2, geom, x * step);
                    const VectorXd vm = field.eval(su2, geom, x * step.adjoint());
                    const VectorXd nabla =
                        (vp - vm) / (2.0 * h) + conn.apply(wj, vx);
                    // g0(nabla, S^{-1} w_j) with S = g0 in these coordinates.
                    div += nabla.dot(wj);
                }
                total += grid.periodic_weight * grid.theta_weight[it] * div;
            }
        }
    }
    return total;
}

GalerkinResult dirac_galerkin_oracle(const BlockContext& ctx, int two_j,
                                     const Su2Grid& grid, double fd_step) {
    const OrbitGeometry& geom = *ctx.geom;
    const FockSpace& fock = *ctx.fock;
    const LieAlgebra& g = *geom.algebra;
    const Su2Realization su2(g);
    const IrrepData irrep = su2_irrep(g, two_j);
    const int d = irrep.dim;
    const int fdim = fock.dim();

    const MatrixXcd inv = invariant_subspace(ctx, irrep);
    const int s = static_cast<int>(inv.cols());
    GalerkinResult result;
    if (s == 0) return result;

    // Column t of inv as the map V -> S (rows in S, columns in V).
    std::vector<MatrixXcd> maps;
    for (int t = 0; t < s; ++t)
        maps.push_back(
            Eigen::Map<const MatrixXcd>(inv.col(t).data(), fdim, d).eval());

    // Representation factors evaluated through the Euler chart only: the
    // theta factor via the eigendecomposition of the unit generator.
    const MatrixXcd dpi1_unit = irrep.generators[1 - 1] / su2.scale();
    const MatrixXcd dpi3_unit = irrep.generators[3 - 1] / su2.scale();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es1(cd(0.0, 1.0) * dpi1_unit);
    const MatrixXcd u1 = es1.eigenvectors();
    const VectorXd lam1 = es1.eigenvalues();
    const VectorXcd lam3 = dpi3_unit.diagonal();
    const auto rep_of = [&](const Matrix2cd& x) -> MatrixXcd {
        const auto angles = su2.euler_angles(x);
        VectorXcd d3a(d), d3b(d), d1(d);
        for (int i = 0; i < d; ++i) {
            d3a[i] = std::exp(angles[0] * lam3[i]);
            d3b[i] = std::exp(angles[2] * lam3[i]);
            d1[i] = std::exp(cd(0.0, -angles[1]) * lam1[i]);
        }
        return d3a.asDiagonal() * (u1 * d1.asDiagonal() * u1.adjoint()) *
               MatrixXcd(d3b.asDiagonal());
    };
    // psi_{m,t}(x) = T_t pi(x)^{-1} v_m; columns of value(x) enumerate (m, t)
    // with m outer.
    const auto values_at = [&](const Matrix2cd& x) -> MatrixXcd {
        const MatrixXcd rep_inv = rep_of(x).adjoint();
        MatrixXcd vals(fdim, d * s);
        for (int m = 0; m < d; ++m)
            for (int t = 0; t < s; ++t)
                vals.col(m * s + t) = maps[t] * rep_inv.col(m);
        return vals;
    };

    // Sampled bundle condition psi(xs) = conj(chi(s)) rho(Ad_s)^{-1} psi(x).
    {
        std::mt19937_64 rng(911);
        std::uniform_real_distribution<double> ang(0.2, 2.8);
        double defect = 0.0;
        for (int trial = 0; trial < 6; ++trial) {
            const Matrix2cd x = su2.chart(ang(rng) * 2.0, ang(rng), ang(rng) * 3.0);
            const double t = ang(rng);
            const VectorXd z = geom.k_sub.basis.col(0);
            const Matrix2cd sgrp = exp_su2(su2.embed((t * z).eval()));
            MatrixXd ad_m(geom.r(), geom.r());
            const MatrixXd id_m = MatrixXd::Identity(geom.r(), geom.r());
            for (int b = 0; b < geom.r(); ++b)
                ad_m.col(b) = geom.mcoords(
                    su2.adjoint(sgrp, geom.membed(id_m.col(b))));
            const MatrixXcd rho = fock.lift_unitary(ad_m);
            const cd chi_bar =
                std::exp(cd(0.0, -t * ctx.character.weight[0]));
            const MatrixXcd lhs = values_at(x * sgrp);
            const MatrixXcd rhs = chi_bar * (rho.adjoint() * values_at(x));
            defect = std::max(defect, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        result.equivariance_defect = defect;
    }

    // Clifford factors of the Dirac operator.
    std::vector<MatrixXcd> kappa_f, sigma_f;
    std::vector<Matrix2cd> step_p, step_m;
    for (int a = 0; a < geom.r(); ++a) {
        const VectorXd f = ctx.frame.col(a);
        kappa_f.push_back(fock.kappa(f));
        sigma_f.push_back(fock.derivation_lift(ctx.conn.endomorphism(f)));
        const Matrix2cd step = exp_su2(su2.embed(geom.membed(fd_step * f)));
        step_p.push_back(step);
        step_m.push_back(step.adjoint());
    }

    const int nb = d * s;
    MatrixXcd a_mat = MatrixXcd::Zero(nb, nb);
    MatrixXcd gram = MatrixXcd::Zero(nb, nb);
    for (double phi : grid.phi) {
        for (size_t it = 0; it < grid.theta.size(); ++it) {
            for (double psi : grid.psi) {
                const double w = grid.periodic_weight * grid.theta_weight[it];
                const Matrix2cd x = su2.chart(phi, grid.theta[it], psi);
                const MatrixXcd vals = values_at(x);
                MatrixXcd dvals = MatrixXcd::Zero(fdim, nb);
                for (int a = 0; a < geom.r(); ++a) {
                    const MatrixXcd deriv =
                        (values_at(x * step_p[a]) - values_at(x * step_m[a])) /
                        (2.0 * fd_step);
                    dvals += kappa_f[a] * (deriv + sigma_f[a] * vals);
                }
                a_mat += w * (vals.adjoint() * dvals);
                gram += w * (vals.adjoint() * vals);
            }
        }
    }

    result.gram_defect =
        (gram - MatrixXcd::Identity(nb, nb) / d).cwiseAbs().maxCoeff();
    const MatrixXcd herm_defect = a_mat - a_mat.adjoint();
    result.hermitian = herm_defect.cwiseAbs().maxCoeff() <= 1e-6;

    if (result.hermitian) {
        // Generalized Hermitian problem A c = lambda G c.
        Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> ges(
            0.5 * (a_mat + a_mat.adjoint()), 0.5 * (gram + gram.adjoint()));
        for (int i = 0; i < nb; ++i)
            result.eigenvalues.emplace_back(ges.eigenvalues()(i), 0.0);
    } else {
        Eigen::ComplexEigenSolver<MatrixXcd> es(gram.inverse() * a_mat);
        for (int i = 0; i < nb; ++i)
            result.eigenvalues.push_back(es.eigenvalues()(i));
        std::sort(result.eigenvalues.begin(), result.eigenvalues.end(),
                  [](cd a, cd b) {
                      return a.real() != b.real() ? a.real() < b.real()
                                                  : a.imag() < b.imag();
                  });
    }
    return result;
}

}  // namespace coorbit
