#include "fluxindex/kspace.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "fluxindex/errors.hpp"
#include "fluxindex/spectral.hpp"

namespace fluxindex {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Rashba bond data shared with the real-space builder: a->b displacements
// and in-plane unit directions of the three honeycomb bonds.
struct KBond {
    double c1, c2;
    double dir1, dir2;
};
constexpr double kHalfSqrt3 = 0.86602540378443864676;
constexpr KBond kBonds[3] = {
    {0.0, 0.0, 0.0, -1.0},
    {-1.0, 0.0, kHalfSqrt3, 0.5},
    {0.0, 1.0, -kHalfSqrt3, 0.5},
};

double wrap_pi(double x) { return std::remainder(x, kTwoPi); }

// Odd time reversal on a Bloch spinor, basis (orb, spin) with spin fastest.
Eigen::VectorXcd theta_bloch(const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out(v.size());
    for (int i = 0; i < v.size(); ++i)
        out[i] = ((i & 1) == 0 ? 1.0 : -1.0) * std::conj(v[i ^ 1]);
    return out;
}

cd normalized_frame_overlap(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const Eigen::Matrix2cd m = a.adjoint() * b;
    const cd det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double mag = std::abs(det);
    if (mag < 1e-12)
        throw std::runtime_error("z2_ebz: degenerate frame overlap (gap too small for grid)");
    return det / mag;
}

cd normalized_scalar_overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    const cd ov = a.dot(b);
    const double mag = std::abs(ov);
    if (mag < 1e-12) throw std::runtime_error("chern_lattice: vanishing link overlap");
    return ov / mag;
}

}  // namespace

BlochHamiltonian BlochHamiltonian::haldane(const HaldaneParams& p, Chirality chirality) {
    BlochHamiltonian bh;
    bh.params_ = p;
    bh.chirality_ = chirality;
    bh.spinful_ = false;
    return bh;
}

BlochHamiltonian BlochHamiltonian::kane_mele(const HaldaneParams& p, double lambda_r) {
    BlochHamiltonian bh;
    bh.params_ = p;
    bh.chirality_ = Chirality::Plus;
    bh.lambda_r_ = lambda_r;
    bh.spinful_ = true;
    return bh;
}

double BlochHamiltonian::delta(double k1, double k2) const {
    const double tp = chirality_ == Chirality::Plus ? params_.t_prime : -params_.t_prime;
    return 2.0 * tp * (std::sin(k1) + std::sin(k2) - std::sin(k1 + k2));
}

std::complex<double> BlochHamiltonian::gamma(double k1, double k2) const {
    return params_.t * (1.0 + std::exp(cd(0.0, k1)) + std::exp(cd(0.0, -k2)));
}

Eigen::MatrixXcd BlochHamiltonian::eval(double k1, double k2) const {
    const cd g = gamma(k1, k2);
    if (!spinful_) {
        const double d = delta(k1, k2);
        Eigen::MatrixXcd h(2, 2);
        h << -d + params_.lambda_v, std::conj(g), g, d - params_.lambda_v;
        return h;
    }
    // Basis (a up, a down, b up, b down); up block carries +t', down -t'.
    const double d = delta(k1, k2);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 4);
    for (int s = 0; s < 2; ++s) {
        const double ds = s == 0 ? d : -d;
        h(0 * 2 + s, 0 * 2 + s) = -ds + params_.lambda_v;
        h(1 * 2 + s, 1 * 2 + s) = ds - params_.lambda_v;
        h(0 * 2 + s, 1 * 2 + s) = std::conj(g);
        h(1 * 2 + s, 0 * 2 + s) = g;
    }
    if (lambda_r_ != 0.0) {
        const cd i(0.0, 1.0);
        for (const KBond& b : kBonds) {
            const cd bloch = std::exp(i * (k1 * b.c1 + k2 * b.c2));
            // Spin matrix i * lr * (dir2 * sx - dir1 * sy).
            const cd t01 = i * lambda_r_ * (b.dir2 + i * b.dir1);
            const cd t10 = i * lambda_r_ * (b.dir2 - i * b.dir1);
            h(0 * 2 + 0, 1 * 2 + 1) += bloch * t01;
            h(0 * 2 + 1, 1 * 2 + 0) += bloch * t10;
            h(1 * 2 + 1, 0 * 2 + 0) += std::conj(bloch * t01);
            h(1 * 2 + 0, 0 * 2 + 1) += std::conj(bloch * t10);
        }
    }
    return h;
}

BZGrid::BZGrid(int points) : n(points) {
    if (points < 6) throw std::invalid_argument("BZGrid: need at least 6 points per axis");
}

BZGrid BZGrid::with_dirac_points(int points) {
    if (points % 3 != 0)
        throw std::invalid_argument("BZGrid: Dirac momenta on-grid requires n divisible by 3");
    return BZGrid(points);
}

double BZGrid::k(int m) const { return kTwoPi * m / n; }

std::vector<DiracPoint> dirac_report(const BlochHamiltonian& bh) {
    if (bh.params().t == 0.0)
        throw std::invalid_argument("dirac_report: Gamma vanishes identically at t = 0");
    const double kd = kTwoPi / 3.0;
    return {DiracPoint{{kd, kd}, bh.delta(kd, kd)},
            DiracPoint{{-kd, -kd}, bh.delta(-kd, -kd)}};
}

namespace {

// Occupied frames on the full grid, with the band gap checked at every node.
std::vector<Eigen::MatrixXcd> occupied_frames(const BlochHamiltonian& bh, int n1, int n2,
                                              const BZGrid& grid) {
    const int occ = bh.occupied();
    std::vector<Eigen::MatrixXcd> frames;
    frames.reserve(static_cast<std::size_t>(n1) * n2);
    for (int m2 = 0; m2 < n2; ++m2) {
        for (int m1 = 0; m1 < n1; ++m1) {
            const EigenDecomposition d = diagonalize(bh.eval(grid.k(m1), grid.k(m2)));
            if (d.eigenvalues[occ] - d.eigenvalues[occ - 1] < 1e-8)
                throw GapClosedError("bands touch on the momentum grid");
            frames.push_back(d.eigenvectors.leftCols(occ));
        }
    }
    return frames;
}

}  // namespace

std::vector<CurvaturePoint> berry_curvature(const BlochHamiltonian& bh, const BZGrid& grid) {
    if (bh.spinful())
        throw std::invalid_argument("chern_lattice: defined for the spinless lower band");
    const int n = grid.n;
    const auto frames = occupied_frames(bh, n, n, grid);
    auto at = [&](int m1, int m2) -> const Eigen::MatrixXcd& {
        return frames[static_cast<std::size_t>(((m2 % n) + n) % n) * n + ((m1 % n) + n) % n];
    };
    // Link phases along +k1 and +k2.
    Eigen::MatrixXd a1(n, n), a2(n, n);
    for (int m2 = 0; m2 < n; ++m2) {
        for (int m1 = 0; m1 < n; ++m1) {
            a1(m1, m2) = std::arg(normalized_scalar_overlap(at(m1, m2).col(0), at(m1 + 1, m2).col(0)));
            a2(m1, m2) = std::arg(normalized_scalar_overlap(at(m1, m2).col(0), at(m1, m2 + 1).col(0)));
        }
    }
    const double cell = (kTwoPi / n) * (kTwoPi / n);
    std::vector<CurvaturePoint> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int m2 = 0; m2 < n; ++m2) {
        for (int m1 = 0; m1 < n; ++m1) {
            const double f = wrap_pi(a1(m1, m2) + a2((m1 + 1) % n, m2) - a1(m1, (m2 + 1) % n) -
                                     a2(m1, m2));
            out.push_back(CurvaturePoint{grid.k(m1), grid.k(m2), -f / cell});
        }
    }
    return out;
}

int chern_lattice(const BlochHamiltonian& bh, const BZGrid& grid) {
    const auto table = berry_curvature(bh, grid);
    const double cell = (kTwoPi / grid.n) * (kTwoPi / grid.n);
    double total = 0.0;
    for (const auto& p : table) total += p.curvature * cell;
    const double chern = total / kTwoPi;
    const double rounded = std::round(chern);
    if (std::abs(chern - rounded) > 1e-9)
        throw std::runtime_error("chern_lattice: non-integer plaquette sum " +
                                 std::to_string(chern));
    return static_cast<int>(rounded);
}

int z2_ebz(const BlochHamiltonian& bh, const BZGrid& grid,
           std::optional<std::uint64_t> rephase_seed) {
    if (!bh.spinful()) throw std::invalid_argument("z2_ebz: needs the spinful Bloch Hamiltonian");
    if (grid.n % 2 != 0) throw std::invalid_argument("z2_ebz: grid size must be even");
    const int n = grid.n;
    const int rows = n / 2 + 1;  // k2 in [0, pi]

    // Precondition: the Bloch map is odd time-reversal symmetric,
    // u conj(H(-k)) u^+ = H(k).
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> uk(-kPi, kPi);
        for (int trial = 0; trial < 4; ++trial) {
            const double k1 = uk(rng), k2 = uk(rng);
            const Eigen::MatrixXcd h = bh.eval(k1, k2);
            const Eigen::MatrixXcd hm = bh.eval(-k1, -k2);
            Eigen::MatrixXcd conj_h(4, 4);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    conj_h(i, j) = (((i & 1) == 0 ? 1.0 : -1.0) * ((j & 1) == 0 ? 1.0 : -1.0)) *
                                   std::conj(hm(i ^ 1, j ^ 1));
            if ((conj_h - h).norm() > 1e-9)
                throw std::invalid_argument("z2_ebz: Bloch map is not odd time-reversal symmetric");
        }
    }

    std::vector<Eigen::MatrixXcd> frames = occupied_frames(bh, n, rows, grid);
    auto frame = [&](int m1, int m2) -> Eigen::MatrixXcd& {
        return frames[static_cast<std::size_t>(m2) * n + ((m1 % n) + n) % n];
    };

    if (rephase_seed) {
        std::mt19937_64 rng(*rephase_seed);
        std::uniform_real_distribution<double> uphase(0.0, kTwoPi);
        for (auto& f : frames)
            for (int c = 0; c < f.cols(); ++c) f.col(c) *= std::exp(cd(0.0, uphase(rng)));
    }

    // Time-reversal-constrained gauge on the boundary rows k2 = 0 and k2 = pi:
    // Kramers frames (phi, Theta phi) at the TRIM nodes, Theta-partners at -k1.
    for (int m2 : {0, n / 2}) {
        for (int m1 : {0, n / 2}) {
            Eigen::MatrixXcd& f = frame(m1, m2);
            const Eigen::VectorXcd phi = f.col(0);
            Eigen::VectorXcd partner = theta_bloch(phi);
            partner -= phi * phi.dot(partner);
            partner.normalize();
            f.col(1) = partner;
        }
        for (int m1 = n / 2 + 1; m1 < n; ++m1) {
            const Eigen::MatrixXcd& src = frame(n - m1, m2);
            Eigen::MatrixXcd& dst = frame(m1, m2);
            for (int c = 0; c < 2; ++c) dst.col(c) = theta_bloch(src.col(c));
        }
    }

    Eigen::MatrixXd a1(n, rows), a2(n, rows - 1);
    for (int m2 = 0; m2 < rows; ++m2)
        for (int m1 = 0; m1 < n; ++m1) {
            a1(m1, m2) = std::arg(normalized_frame_overlap(frame(m1, m2), frame(m1 + 1, m2)));
            if (m2 + 1 < rows)
                a2(m1, m2) = std::arg(normalized_frame_overlap(frame(m1, m2), frame(m1, m2 + 1)));
        }

    double field_sum = 0.0;
    for (int m2 = 0; m2 + 1 < rows; ++m2)
        for (int m1 = 0; m1 < n; ++m1)
            field_sum += wrap_pi(a1(m1, m2) + a2((m1 + 1) % n, m2) - a1(m1, m2 + 1) - a2(m1, m2));

    double boundary_sum = 0.0;
    for (int m1 = 0; m1 < n; ++m1) boundary_sum += a1(m1, 0) - a1(m1, rows - 1);

    const double d_raw = (boundary_sum - field_sum) / kTwoPi;
    const double rounded = std::round(d_raw);
    if (std::abs(d_raw - rounded) > 1e-6)
        throw std::runtime_error("z2_ebz: non-integer invariant " + std::to_string(d_raw));
    return static_cast<int>(std::abs(std::fmod(rounded, 2.0)));
}

GaugePatchPair::GaugePatchPair(const BlochHamiltonian& bh) : bh_(bh) {
    if (bh.spinful())
        throw std::invalid_argument("GaugePatchPair: patches are for the spinless model");
}

namespace {

double effective_delta(const BlochHamiltonian& bh, double k1, double k2) {
    return bh.delta(k1, k2) - bh.params().lambda_v;
}

}  // namespace

double GaugePatchPair::f_norm_factor(double k1, double k2) const {
    const double d = effective_delta(bh_, k1, k2);
    const double e = std::sqrt(d * d + std::norm(bh_.gamma(k1, k2)));
    return std::sqrt(2.0 * e * (e + d));
}

double GaugePatchPair::g_norm_factor(double k1, double k2) const {
    const double d = effective_delta(bh_, k1, k2);
    const double e = std::sqrt(d * d + std::norm(bh_.gamma(k1, k2)));
    return std::sqrt(2.0 * e * (e - d));
}

Eigen::Vector2cd GaugePatchPair::f_minus(double k1, double k2) const {
    const double d = effective_delta(bh_, k1, k2);
    const cd g = bh_.gamma(k1, k2);
    const double e = std::sqrt(d * d + std::norm(g));
    const double nf = std::sqrt(2.0 * e * (e + d));
    return Eigen::Vector2cd(cd(e + d, 0.0) / nf, -g / nf);
}

Eigen::Vector2cd GaugePatchPair::g_minus(double k1, double k2) const {
    const double d = effective_delta(bh_, k1, k2);
    const cd g = bh_.gamma(k1, k2);
    const double e = std::sqrt(d * d + std::norm(g));
    const double ng = std::sqrt(2.0 * e * (e - d));
    return Eigen::Vector2cd(-std::conj(g) / ng, cd(e - d, 0.0) / ng);
}

std::complex<double> GaugePatchPair::transition_phase(double k1, double k2) const {
    const cd g = bh_.gamma(k1, k2);
    const double mag = std::abs(g);
    if (mag == 0.0)
        throw std::runtime_error("GaugePatchPair: transition phase undefined where Gamma = 0");
    return -g / mag;
}

double eta_winding(const GaugePatchPair& p, double k2, int steps) {
    double winding = 0.0;
    cd prev = p.transition_phase(-kPi, k2);
    for (int m = 1; m <= steps; ++m) {
        const double k1 = -kPi + kTwoPi * m / steps;
        const cd cur = p.transition_phase(k1, k2);
        winding += std::arg(cur / prev);
        prev = cur;
    }
    return winding;
}

std::complex<double> gauge_patch_kupklow(const GaugePatchPair& p, const BZGrid& grid) {
    const double w0 = eta_winding(p, 0.0, grid.n);
    const double wpi = eta_winding(p, kPi, grid.n);
    return cd(0.0, 1.0) * (w0 - wpi);
}

bool gauge_patch_check(const GaugePatchPair& p, const BZGrid& grid) {
    for (int m2 = 0; m2 < grid.n; ++m2) {
        for (int m1 = 0; m1 < grid.n; ++m1) {
            const double k1 = -kPi + grid.k(m1);
            const double k2 = -kPi + grid.k(m2);
            if (std::abs(p.bloch().gamma(k1, k2)) <= 1e-6) continue;
            if (p.f_norm_factor(k1, k2) <= 1e-6 || p.g_norm_factor(k1, k2) <= 1e-6) continue;
            const Eigen::Vector2cd f = p.f_minus(k1, k2);
            const Eigen::Vector2cd g = p.g_minus(k1, k2) * p.transition_phase(k1, k2);
            if ((f - g).norm() > 1e-10) return false;
        }
    }
    const cd kup_klow = gauge_patch_kupklow(p, grid);
    return std::abs(kup_klow - cd(0.0, -kTwoPi)) <= 0.01 * kTwoPi;
}

}  // namespace fluxindex
