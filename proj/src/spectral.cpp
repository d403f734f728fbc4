#include "fluxindex/spectral.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluxindex/errors.hpp"

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

namespace fluxindex {

namespace {

void require_hermitian(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("diagonalize: matrix not square");
    const double dev = (h - h.adjoint()).norm();
    if (dev >= 1e-12 * static_cast<double>(h.rows()))
        throw std::invalid_argument("diagonalize: matrix not Hermitian (|H - H^+| = " +
                                    std::to_string(dev) + ")");
}

Eigen::VectorXd zheevd(Eigen::MatrixXcd& a, char jobz) {
    const int n = static_cast<int>(a.rows());
    Eigen::VectorXd w(n);
    if (n == 0) return w;
    const int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n, a.data(), n, w.data());
    if (info != 0)
        throw std::runtime_error("zheevd failed with info = " + std::to_string(info));
    return w;
}

// Rotate each column so its first component with magnitude above half the
// column max is real positive; pins the free eigenvector phase.
void fix_phases(Eigen::MatrixXcd& v) {
    for (int j = 0; j < v.cols(); ++j) {
        const double top = v.col(j).cwiseAbs().maxCoeff();
        if (top == 0.0) continue;
        for (int i = 0; i < v.rows(); ++i) {
            const double mag = std::abs(v(i, j));
            if (mag > 0.5 * top) {
                v.col(j) *= std::conj(v(i, j)) / mag;
                break;
            }
        }
    }
}

}  // namespace

EigenDecomposition diagonalize(const Eigen::MatrixXcd& h) {
    require_hermitian(h);
    Eigen::MatrixXcd v = h;
    Eigen::VectorXd w = zheevd(v, 'V');
    fix_phases(v);
    return EigenDecomposition{std::move(w), std::move(v)};
}

EigenDecomposition diagonalize(const Hamiltonian& h) { return diagonalize(h.matrix); }

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
    require_hermitian(h);
    Eigen::MatrixXcd a = h;
    return zheevd(a, 'N');
}

double hermitian_spectral_norm(const Eigen::MatrixXcd& h) {
    if (h.rows() == 0) return 0.0;
    const Eigen::VectorXd w = hermitian_eigenvalues(h);
    return std::max(std::abs(w[0]), std::abs(w[w.size() - 1]));
}

FermiProjection fermi_projection(const EigenDecomposition& d, double e_f) {
    const int n = static_cast<int>(d.eigenvalues.size());
    int rank = 0;
    for (int i = 0; i < n; ++i) {
        if (std::abs(d.eigenvalues[i] - e_f) < 1e-10)
            throw GapClosedError("fermi_projection: Fermi level on spectrum (E = " +
                                 std::to_string(d.eigenvalues[i]) + ")");
        if (d.eigenvalues[i] < e_f) ++rank;
    }
    const auto occ = d.eigenvectors.leftCols(rank);
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
    p.selfadjointView<Eigen::Lower>().rankUpdate(occ);
    p.triangularView<Eigen::StrictlyUpper>() = p.adjoint();
    return FermiProjection{std::move(p), rank, e_f};
}

GapReport spectral_gap(const Eigen::VectorXd& eigenvalues, double e_f) {
    double ho = -std::numeric_limits<double>::infinity();
    double le = std::numeric_limits<double>::infinity();
    for (int i = 0; i < eigenvalues.size(); ++i) {
        const double e = eigenvalues[i];
        if (e <= e_f && e > ho) ho = e;
        if (e >= e_f && e < le) le = e;
    }
    return GapReport{ho, le, le - ho, e_f};
}

GapReport spectral_gap(const EigenDecomposition& d, double e_f) {
    return spectral_gap(d.eigenvalues, e_f);
}

std::pair<double, double> projection_perturbation_norm(const Hamiltonian& h,
                                                       const Hamiltonian& dh, double e_f) {
    if (h.dim() != dh.dim())
        throw std::invalid_argument("projection_perturbation_norm: dimension mismatch");
    const Hamiltonian hp{h.spec, h.matrix + dh.matrix};
    const auto d0 = diagonalize(h);
    const auto d1 = diagonalize(hp);
    const auto p0 = fermi_projection(d0, e_f);
    const auto p1 = fermi_projection(d1, e_f);
    const double pdiff = hermitian_spectral_norm(p1.matrix - p0.matrix);
    const double dnorm = hermitian_spectral_norm(dh.matrix);
    return {pdiff, dnorm};
}

}  // namespace fluxindex
