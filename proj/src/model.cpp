#include "fluxindex/model.hpp"

#include <array>
#include <random>
#include <stdexcept>

namespace fluxindex {

namespace {

using cd = std::complex<double>;

constexpr int kOrbA = 0;
constexpr int kOrbB = 1;

struct Hop {
    int dn1, dn2;  // column site displacement
    int orb_from;  // row orbital
    int orb_to;    // column orbital
    cd amplitude;
};

// Hopping table transcribing the two coupled Schroedinger equations of the
// square-lattice Haldane model; rows act on (n, orb_from), columns sit at
// (n + dn, orb_to).
std::array<Hop, 18> haldane_hops(double t, double tp) {
    const cd itp(0.0, tp);
    return {{
        // row a: nearest-neighbor t terms
        {-1, 0, kOrbA, kOrbB, t},
        {0, 0, kOrbA, kOrbB, t},
        {0, 1, kOrbA, kOrbB, t},
        // row a: second-neighbor i t' terms
        {-1, -1, kOrbA, kOrbA, itp},
        {0, -1, kOrbA, kOrbA, -itp},
        {1, 0, kOrbA, kOrbA, itp},
        {1, 1, kOrbA, kOrbA, -itp},
        {0, 1, kOrbA, kOrbA, itp},
        {-1, 0, kOrbA, kOrbA, -itp},
        // row b: nearest-neighbor t terms
        {0, 0, kOrbB, kOrbA, t},
        {0, -1, kOrbB, kOrbA, t},
        {1, 0, kOrbB, kOrbA, t},
        // row b: second-neighbor i t' terms
        {-1, 0, kOrbB, kOrbB, itp},
        {-1, -1, kOrbB, kOrbB, -itp},
        {0, -1, kOrbB, kOrbB, itp},
        {1, 0, kOrbB, kOrbB, -itp},
        {1, 1, kOrbB, kOrbB, itp},
        {0, 1, kOrbB, kOrbB, -itp},
    }};
}

void fill_haldane_sector(Eigen::MatrixXcd& m, const StateIndexer& idx, int spin,
                         const HaldaneParams& p, Chirality chirality) {
    const auto& spec = idx.spec();
    const double tp = chirality == Chirality::Plus ? p.t_prime : -p.t_prime;
    const auto hops = haldane_hops(p.t, tp);
    for (int n2 = 0; n2 < spec.l2; ++n2) {
        for (int n1 = 0; n1 < spec.l1; ++n1) {
            for (const Hop& h : hops) {
                const int row = idx.flat(n1, n2, h.orb_from, spin);
                const int col = idx.neighbor(n1, n2, h.dn1, h.dn2, h.orb_to, spin);
                if (col >= 0) m(row, col) += h.amplitude;
            }
            m(idx.flat(n1, n2, kOrbA, spin), idx.flat(n1, n2, kOrbA, spin)) += p.lambda_v;
            m(idx.flat(n1, n2, kOrbB, spin), idx.flat(n1, n2, kOrbB, spin)) -= p.lambda_v;
        }
    }
}

// The three a->b bond types with their in-plane unit directions (the
// honeycomb bond vectors, 120 degrees apart).
struct RashbaBond {
    int dn1, dn2;
    double dir1, dir2;
};

constexpr double kHalfSqrt3 = 0.86602540378443864676;

constexpr std::array<RashbaBond, 3> kRashbaBonds = {{
    {0, 0, 0.0, -1.0},
    {-1, 0, kHalfSqrt3, 0.5},
    {0, 1, -kHalfSqrt3, 0.5},
}};

// Spin matrix i*lr*(dir2*sx - dir1*sy) of the Rashba hop along a bond.
std::array<std::array<cd, 2>, 2> rashba_spin_matrix(double lr, const RashbaBond& b) {
    const cd i(0.0, 1.0);
    // sx = [[0,1],[1,0]], sy = [[0,-i],[i,0]]
    std::array<std::array<cd, 2>, 2> m{};
    m[0][1] = i * lr * (b.dir2 - (-i) * b.dir1);
    m[1][0] = i * lr * (b.dir2 - i * b.dir1);
    return m;
}

void fill_rashba(Eigen::MatrixXcd& m, const StateIndexer& idx, double lr) {
    const auto& spec = idx.spec();
    for (int n2 = 0; n2 < spec.l2; ++n2) {
        for (int n1 = 0; n1 < spec.l1; ++n1) {
            for (const RashbaBond& b : kRashbaBonds) {
                const auto spin_m = rashba_spin_matrix(lr, b);
                for (int alpha = 0; alpha < 2; ++alpha) {
                    for (int beta = 0; beta < 2; ++beta) {
                        const cd amp = spin_m[alpha][beta];
                        if (amp == cd(0.0, 0.0)) continue;
                        const int row = idx.flat(n1, n2, kOrbA, alpha);
                        const int col = idx.neighbor(n1, n2, b.dn1, b.dn2, kOrbB, beta);
                        if (col < 0) continue;
                        m(row, col) += amp;
                        m(col, row) += std::conj(amp);
                    }
                }
            }
        }
    }
}

}  // namespace

Hamiltonian build_haldane(const HaldaneParams& params, const LatticeSpec& spec,
                          Chirality chirality) {
    spec.validate();
    if (spec.orbitals != 2)
        throw std::invalid_argument("build_haldane: model needs exactly 2 orbitals");
    StateIndexer idx(spec);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(spec.dim(), spec.dim());
    fill_haldane_sector(m, idx, 0, params, chirality);
    return Hamiltonian{spec, std::move(m)};
}

Hamiltonian build_kane_mele(const KaneMeleParams& params, const LatticeSpec& spec) {
    spec.validate();
    if (spec.orbitals != 2 || spec.spins != 2)
        throw std::invalid_argument("build_kane_mele: model needs 2 orbitals and 2 spins");
    StateIndexer idx(spec);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(spec.dim(), spec.dim());
    fill_haldane_sector(m, idx, 0, params.haldane, Chirality::Plus);
    fill_haldane_sector(m, idx, 1, params.haldane, Chirality::Minus);
    if (params.lambda_r != 0.0) fill_rashba(m, idx, params.lambda_r);
    Hamiltonian h{spec, std::move(m)};
    if (params.disorder_w != 0.0) h = add_disorder(h, params.disorder_w, params.seed);
    return h;
}

Eigen::VectorXd disorder_profile(const LatticeSpec& spec, double w, std::uint64_t seed) {
    if (w < 0.0) throw std::invalid_argument("disorder amplitude must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-0.5, 0.5);
    Eigen::VectorXd v(spec.sites());
    for (int s = 0; s < spec.sites(); ++s) v[s] = w * uniform(rng);
    return v;
}

Hamiltonian add_disorder(const Hamiltonian& h, double w, std::uint64_t seed) {
    if (w < 0.0) throw std::invalid_argument("add_disorder: amplitude must be >= 0");
    if (w == 0.0) return h;
    const Eigen::VectorXd v = disorder_profile(h.spec, w, seed);
    StateIndexer idx(h.spec);
    Hamiltonian out = h;
    for (int i = 0; i < h.dim(); ++i) {
        const auto st = idx.unflat(i);
        out.matrix(i, i) += v[idx.site(st.n1, st.n2)];
    }
    return out;
}

TimeReversalOp::TimeReversalOp(LatticeSpec spec) : spec_(spec), indexer_(spec) {
    if (spec.spins != 2)
        throw std::invalid_argument("TimeReversalOp: odd time reversal needs 2 spins");
}

int TimeReversalOp::partner(int index) const { return index ^ 1; }

double TimeReversalOp::sign(int index) const { return (index & 1) == 0 ? 1.0 : -1.0; }

Eigen::VectorXcd TimeReversalOp::apply(const Eigen::VectorXcd& phi) const {
    if (phi.size() != spec_.dim())
        throw std::invalid_argument("TimeReversalOp: dimension mismatch");
    Eigen::VectorXcd out(phi.size());
    for (int i = 0; i < phi.size(); ++i) out[i] = sign(i) * std::conj(phi[partner(i)]);
    return out;
}

Eigen::MatrixXcd TimeReversalOp::conjugate(const Eigen::MatrixXcd& m) const {
    if (m.rows() != spec_.dim() || m.cols() != spec_.dim())
        throw std::invalid_argument("TimeReversalOp: dimension mismatch");
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            out(i, j) = sign(i) * sign(j) * std::conj(m(partner(i), partner(j)));
    return out;
}

bool check_odd_trs(const Hamiltonian& h, const TimeReversalOp& theta, double tol) {
    if (h.dim() != theta.spec().dim())
        throw std::invalid_argument("check_odd_trs: dimension mismatch");
    return (theta.conjugate(h.matrix) - h.matrix).norm() < tol * h.dim();
}

}  // namespace fluxindex
