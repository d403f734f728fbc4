#ifndef FLUXINDEX_KSPACE_HPP
#define FLUXINDEX_KSPACE_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "fluxindex/model.hpp"

namespace fluxindex {

/* Bloch Hamiltonian of the translation-invariant models.
   Spinless Haldane (2x2):
       H(k) = [[-Delta(k) + lambda_v, conj(Gamma(k))], [Gamma(k), Delta(k) - lambda_v]]
   with Delta(k) = 2 t' [sin k1 + sin k2 - sin(k1 + k2)] and
   Gamma(k) = t (1 + e^{i k1} + e^{-i k2}).
   Spinful Kane-Mele (4x4): the two chirality blocks plus the Rashba coupling,
   basis ordered (orbital, spin) = (a up, a down, b up, b down). */
class BlochHamiltonian {
public:
    static BlochHamiltonian haldane(const HaldaneParams& p, Chirality chirality = Chirality::Plus);
    static BlochHamiltonian kane_mele(const HaldaneParams& p, double lambda_r);

    Eigen::MatrixXcd eval(double k1, double k2) const;
    double delta(double k1, double k2) const;              // chirality-signed
    std::complex<double> gamma(double k1, double k2) const;

    bool spinful() const { return spinful_; }
    int bands() const { return spinful_ ? 4 : 2; }
    int occupied() const { return bands() / 2; }
    const HaldaneParams& params() const { return params_; }

private:
    HaldaneParams params_;
    Chirality chirality_ = Chirality::Plus;
    double lambda_r_ = 0.0;
    bool spinful_ = false;
};

// Uniform grid k_j = 2*pi*m/n, m = 0..n-1 per axis.
struct BZGrid {
    int n;
    explicit BZGrid(int points);
    // Grid whose nodes include the Dirac momenta +-(2pi/3, 2pi/3).
    static BZGrid with_dirac_points(int points);
    double k(int m) const;
};

struct DiracPoint {
    Eigen::Vector2d momentum;
    double mass;  // Delta at the zero of Gamma
};

// The two zeros of Gamma in (-pi, pi]^2 with their masses.
std::vector<DiracPoint> dirac_report(const BlochHamiltonian& bh);

// Lattice Chern number of the lower band via plaquette field strengths;
// exact integer (throws if the rounding residual exceeds 1e-9 or the bands
// touch on the grid).
int chern_lattice(const BlochHamiltonian& bh, const BZGrid& grid);

struct CurvaturePoint {
    double k1, k2;      // plaquette corner
    double curvature;   // Berry curvature density; integrates to 2*pi*chern
};
std::vector<CurvaturePoint> berry_curvature(const BlochHamiltonian& bh, const BZGrid& grid);

// Z2 invariant from the half-Brillouin-zone (EBZ) discretization with a
// time-reversal-constrained gauge on the boundary lines k2 = 0 and k2 = pi.
// rephase_seed injects random per-frame gauge noise (the result must not
// depend on it). Requires a spinful, odd-TRS Bloch Hamiltonian.
int z2_ebz(const BlochHamiltonian& bh, const BZGrid& grid,
           std::optional<std::uint64_t> rephase_seed = {});

/* The two lower-band gauge patches of the spinless model:
     f_-(k) = (E + D, -Gamma) / sqrt(2 E (E + D))   (singular at the -K Dirac point)
     g_-(k) = (-conj(Gamma), E - D) / sqrt(2 E (E - D))   (singular at +K)
   related by f_- = e^{i eta} g_- with e^{i eta} = -Gamma/|Gamma|. */
class GaugePatchPair {
public:
    explicit GaugePatchPair(const BlochHamiltonian& bh);  // spinless only

    Eigen::Vector2cd f_minus(double k1, double k2) const;
    Eigen::Vector2cd g_minus(double k1, double k2) const;
    double f_norm_factor(double k1, double k2) const;  // sqrt(2E(E+D))
    double g_norm_factor(double k1, double k2) const;  // sqrt(2E(E-D))
    std::complex<double> transition_phase(double k1, double k2) const;  // e^{i eta}

    const BlochHamiltonian& bloch() const { return bh_; }

private:
    BlochHamiltonian bh_;
};

// Winding of the transition phase along the circle k2 = const.
double eta_winding(const GaugePatchPair& p, double k2, int steps);

// The boundary-integral pair K^up + K^low = i [winding(eta; k2=0) - winding(eta; k2=pi)].
std::complex<double> gauge_patch_kupklow(const GaugePatchPair& p, const BZGrid& grid);

// True iff f_- = e^{i eta} g_- holds to 1e-10 at all grid points away from
// the patch singularities and K^up + K^low = -2*pi*i within 1%.
bool gauge_patch_check(const GaugePatchPair& p, const BZGrid& grid);

}  // namespace fluxindex

#endif
