#ifndef FLUXINDEX_NCINDEX_HPP
#define FLUXINDEX_NCINDEX_HPP

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "fluxindex/lattice.hpp"
#include "fluxindex/model.hpp"
#include "fluxindex/spectral.hpp"

#include "json.hpp"

namespace fluxindex {

/* Site-diagonal flux-insertion unitary
       U_a(u) = (u1 + i u2 - (a1 + i a2)) / |u1 + i u2 - (a1 + i a2)|,
   broadcast over orbital and spin. Defined on open boxes only; the phase
   field is single-valued on the plane but not on the torus. */
class FluxUnitary {
public:
    FluxUnitary(const LatticeSpec& spec, DualPoint a);

    std::complex<double> site_phase(int n1, int n2) const;
    // Diagonal of U_a in flat-index order.
    const Eigen::VectorXcd& diagonal() const { return diag_; }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& phi) const;
    Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& phi) const;
    // U_a M U_a^*, evaluated by row/column phase scaling.
    Eigen::MatrixXcd sandwich(const Eigen::MatrixXcd& m) const;

    DualPoint anchor() const { return a_; }
    const LatticeSpec& spec() const { return spec_; }

private:
    LatticeSpec spec_;
    DualPoint a_;
    Eigen::VectorXcd diag_;
};

/* A = P_F - U_a P_F U_a^* and its supersymmetry partner
   B = 1 - P_F - U_a P_F U_a^*; they satisfy AB + BA = 0, A^2 + B^2 = 1. */
struct PairProjectionOps {
    Eigen::MatrixXcd a_op;
    Eigen::MatrixXcd b_op;

    int dim() const { return static_cast<int>(a_op.rows()); }
    // The Fermi projection recovered as (A - B + 1)/2.
    Eigen::MatrixXcd fermi_projection() const;
};

PairProjectionOps build_pair_ops(const FermiProjection& p, const FluxUnitary& u);

struct IndexReport {
    Eigen::VectorXd eigenvalues;  // of A, ascending
    int n_plus = 0;               // eigenvalues in [1 - delta, 1]
    int n_minus = 0;              // eigenvalues in [-1, -1 + delta]
    double trace_a3 = 0.0;
    int chern = 0;                // round(trace_a3)
    int z2 = 0;                   // n_plus mod 2
    double residual = 0.0;        // |trace_a3 - chern|
    double delta = 0.5;
    bool ambiguous_window = false;  // eigenvalue within 1e-3 of a window edge

    nlohmann::json to_json() const;  // flat record, without the eigenvalue array
};

// Spectral report of A. trace_a3 is computed both as a direct matrix-product
// trace and as sum(lambda^3); the two routes must agree to 1e-8.
IndexReport index_report(const PairProjectionOps& ops, double delta = 0.5);
std::vector<IndexReport> index_report_multi(const PairProjectionOps& ops,
                                            std::span<const double> deltas);

// Supersymmetry pairing: in-window eigenvalues come in +/-lambda pairs with
// equal multiplicity, and B maps lambda-eigenvectors to -lambda ones.
bool susy_pairing_check(const PairProjectionOps& ops, std::pair<double, double> window,
                        double tol);

// Kramers-type degeneracy of A under odd time reversal: every in-window
// eigenvalue cluster has even multiplicity; sampled eigenvectors phi satisfy
// that U_a (B phi)^Theta is a same-eigenvalue partner orthogonal to phi and
// U_a phi^Theta has eigenvalue -lambda. Throws std::invalid_argument when
// the underlying Fermi projection is not time-reversal symmetric.
bool trs_even_degeneracy_check(const PairProjectionOps& ops, const TimeReversalOp& theta,
                               const FluxUnitary& u, std::pair<double, double> window,
                               double tol);

// Theta^2 = -1, antiunitarity, and U^Theta U_a (U^Theta)^* = U_a.
bool check_theta_conditions(const TimeReversalOp& theta, const FluxUnitary& u);

// True iff chern and z2 agree across all flux anchors in a_list. Anchors
// must sit at interior distance >= min(L1, L2)/4.
bool flux_position_invariance(const Hamiltonian& h, double e_f, std::span<const DualPoint> a_list,
                              double delta = 0.5);

// Truncated Connes area sum over dual points with |a| <= radius:
//     sum_a tau_{u,v} tau_{v,w} tau_{w,u},
// tau_{u,v} = 1 - U_a(u) conj(U_a(v)). Converges to connes_area_target.
std::complex<double> connes_area_sum(Eigen::Vector2i u, Eigen::Vector2i v, Eigen::Vector2i w,
                                     int radius);
std::complex<double> connes_area_target(Eigen::Vector2i u, Eigen::Vector2i v, Eigen::Vector2i w);

// Real-space Chern estimator
//   -2*pi*i / |region| * Tr chi P [[X1,P],[X2,P]] chi
// with X_j the site-coordinate operators and |region| the site count.
double local_chern_marker(const StateIndexer& indexer, const FermiProjection& p,
                          const RegionMask& region);

// Finite-volume Kubo Hall conductance from the eigenbasis, with local
// currents J_j = i[H, theta_j] cut at the dual point a.
double kubo_hall(const StateIndexer& indexer, const EigenDecomposition& d, double e_f,
                 DualPoint a);

}  // namespace fluxindex

#endif
