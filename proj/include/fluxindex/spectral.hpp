#ifndef FLUXINDEX_SPECTRAL_HPP
#define FLUXINDEX_SPECTRAL_HPP

#include <Eigen/Dense>
#include <utility>

#include "fluxindex/model.hpp"

namespace fluxindex {

struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;    // ascending
    Eigen::MatrixXcd eigenvectors;  // orthonormal columns, phase-fixed
};

// Full Hermitian eigendecomposition (LAPACK zheevd). Eigenvalues ascend;
// each eigenvector is rephased so its first significant component is real
// positive. Throws std::invalid_argument when the input is not Hermitian
// within 1e-12 * dim in Frobenius norm.
EigenDecomposition diagonalize(const Eigen::MatrixXcd& h);
EigenDecomposition diagonalize(const Hamiltonian& h);

// Eigenvalues only; much faster when vectors are not needed.
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h);

// Spectral norm of a Hermitian matrix.
double hermitian_spectral_norm(const Eigen::MatrixXcd& h);

struct FermiProjection {
    Eigen::MatrixXcd matrix;
    int rank = 0;
    double fermi_energy = 0.0;
};

// Projector onto eigenstates with energy below e_f. Throws GapClosedError
// when e_f is within 1e-10 of an eigenvalue.
FermiProjection fermi_projection(const EigenDecomposition& d, double e_f);

struct GapReport {
    double highest_occupied;
    double lowest_empty;
    double gap;
    double fermi_energy;
};

// Gap of the spectrum around e_f; gap = 0 signals closure. Levels equal to
// e_f land on both sides, so a state at the Fermi level reports gap 0.
GapReport spectral_gap(const EigenDecomposition& d, double e_f);
GapReport spectral_gap(const Eigen::VectorXd& eigenvalues, double e_f);

// (||P' - P||_2, ||dh||_2) for the Fermi projections of h and h + dh.
// Throws GapClosedError when either operator has e_f on its spectrum.
std::pair<double, double> projection_perturbation_norm(const Hamiltonian& h,
                                                       const Hamiltonian& dh, double e_f);

}  // namespace fluxindex

#endif
