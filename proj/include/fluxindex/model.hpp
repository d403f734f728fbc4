#ifndef FLUXINDEX_MODEL_HPP
#define FLUXINDEX_MODEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "fluxindex/lattice.hpp"

namespace fluxindex {

struct HaldaneParams {
    double t = 1.0;        // nearest-neighbor hopping
    double t_prime = 0.1;  // second-neighbor pure-imaginary hopping
    double lambda_v = 0.0; // staggered sublattice potential (+ on orbital a, - on b)
};

enum class Chirality { Plus, Minus };

struct KaneMeleParams {
    HaldaneParams haldane;
    double lambda_r = 0.0;    // Rashba spin-mixing strength
    double disorder_w = 0.0;  // on-site disorder amplitude, values in [-W/2, W/2]
    std::uint64_t seed = 0;
};

struct Hamiltonian {
    LatticeSpec spec;
    Eigen::MatrixXcd matrix;

    int dim() const { return static_cast<int>(matrix.rows()); }
};

// Spinless Haldane model on the square-lattice embedding, filled into the
// spin-up sector (the down sector, if present, is left zero). Chirality
// Minus flips the sign of t', giving the time-reversed copy.
Hamiltonian build_haldane(const HaldaneParams& params, const LatticeSpec& spec,
                          Chirality chirality = Chirality::Plus);

// Kane-Mele model: spin-up Haldane(+t') plus spin-down Haldane(-t'),
// coupled by the Rashba term and shifted by on-site disorder.
Hamiltonian build_kane_mele(const KaneMeleParams& params, const LatticeSpec& spec);

// Adds i.i.d. on-site energies drawn uniformly from [-w/2, w/2], identical
// for every orbital/spin channel of a site. Deterministic given the seed,
// and the site pattern is seed-only so that w scales a fixed disorder ray.
Hamiltonian add_disorder(const Hamiltonian& h, double w, std::uint64_t seed);

// Per-site disorder values for a given seed and amplitude (site-major order).
Eigen::VectorXd disorder_profile(const LatticeSpec& spec, double w, std::uint64_t seed);

/* Odd time reversal Theta = U^Theta followed by complex conjugation, with
   U^Theta acting as identity on sites/orbitals and as the antisymmetric
   rotation (up,down) -> (down, -up) on spin. Theta^2 = -1. */
class TimeReversalOp {
public:
    explicit TimeReversalOp(LatticeSpec spec);  // requires spins == 2

    Eigen::VectorXcd apply(const Eigen::VectorXcd& phi) const;
    // U^Theta conj(M) (U^Theta)^dagger, the conjugation appearing in the
    // odd-TRS condition for operators.
    Eigen::MatrixXcd conjugate(const Eigen::MatrixXcd& m) const;

    const LatticeSpec& spec() const { return spec_; }

private:
    int partner(int index) const;       // flat index with spin flipped
    double sign(int index) const;       // +1 for spin-up rows, -1 for spin-down
    LatticeSpec spec_;
    StateIndexer indexer_;
};

// True iff || U^Theta conj(H) (U^Theta)^dagger - H ||_F < tol * dim.
bool check_odd_trs(const Hamiltonian& h, const TimeReversalOp& theta, double tol = 1e-12);

}  // namespace fluxindex

#endif
