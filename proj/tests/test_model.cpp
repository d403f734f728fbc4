#include "doctest.h"

#include <complex>
#include <random>

#include "fluxindex/model.hpp"
#include "fluxindex/spectral.hpp"

using namespace fluxindex;
using cd = std::complex<double>;

namespace {

const LatticeSpec kOpen8{8, 8, Boundary::Open, 2, 2};
const LatticeSpec kSpinless8{8, 8, Boundary::Open, 2, 1};

bool hermitian(const Hamiltonian& h) {
    return (h.matrix - h.matrix.adjoint()).norm() < 1e-12 * h.dim();
}

}  // namespace

TEST_CASE("zero couplings give the zero matrix") {
    const auto h = build_haldane({0.0, 0.0, 0.0}, kSpinless8);
    CHECK(h.matrix.norm() == 0.0);
}

TEST_CASE("builders produce Hermitian matrices with hopping range 1") {
    const auto h = build_kane_mele({{1.0, 0.1, 0.3}, 0.07, 0.4, 11}, kOpen8);
    CHECK(hermitian(h));
    StateIndexer idx(kOpen8);
    for (int i = 0; i < h.dim(); ++i) {
        const auto a = idx.unflat(i);
        for (int j = 0; j < h.dim(); ++j) {
            const auto b = idx.unflat(j);
            const int dist = std::max(std::abs(a.n1 - b.n1), std::abs(a.n2 - b.n2));
            if (dist > 1) CHECK(h.matrix(i, j) == cd(0.0, 0.0));
        }
    }
    CHECK(hermitian(build_haldane({1.0, 0.1, 0.0}, kSpinless8, Chirality::Minus)));
    CHECK(hermitian(build_haldane({-0.7, 0.3, 0.2}, {10, 6, Boundary::Periodic, 2, 1})));
}

TEST_CASE("kane-mele decouples into conjugate spin blocks at lambda_r = 0") {
    const auto h = build_kane_mele({{1.0, 0.1, 0.2}, 0.0, 0.0, 0}, kOpen8);
    StateIndexer idx(kOpen8);
    const int half = h.dim() / 2;
    Eigen::MatrixXcd up(half, half), down(half, half);
    for (int i = 0; i < h.dim(); i += 2)
        for (int j = 0; j < h.dim(); j += 2) {
            up(i / 2, j / 2) = h.matrix(i, j);
            down(i / 2, j / 2) = h.matrix(i + 1, j + 1);
            CHECK(h.matrix(i, j + 1) == cd(0.0, 0.0));
            CHECK(h.matrix(i + 1, j) == cd(0.0, 0.0));
        }
    CHECK((down - up.conjugate()).norm() == 0.0);
    // and the up block is the plus-chirality Haldane matrix
    const auto haldane_up = build_haldane({1.0, 0.1, 0.2}, kSpinless8);
    CHECK((up - haldane_up.matrix).norm() == 0.0);
}

TEST_CASE("odd time reversal symmetry of the kane-mele model") {
    const TimeReversalOp theta(kOpen8);
    CHECK(check_odd_trs(build_kane_mele({{1.0, 0.1, 0.0}, 0.05, 0.0, 0}, kOpen8), theta));
    CHECK(check_odd_trs(build_kane_mele({{1.0, 0.1, 0.3}, 0.11, 0.5, 3}, kOpen8), theta));
    CHECK(check_odd_trs(Hamiltonian{kOpen8, Eigen::MatrixXcd::Zero(kOpen8.dim(), kOpen8.dim())},
                        theta));
    // a single spin-up Haldane block breaks time reversal
    CHECK(!check_odd_trs(build_haldane({1.0, 0.1, 0.0}, kOpen8), theta));
}

TEST_CASE("theta is an odd antiunitary") {
    const TimeReversalOp theta(kOpen8);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXcd psi(kOpen8.dim()), phi(kOpen8.dim());
        for (int i = 0; i < psi.size(); ++i) {
            psi[i] = cd(g(rng), g(rng));
            phi[i] = cd(g(rng), g(rng));
        }
        CHECK((theta.apply(theta.apply(psi)) + psi).norm() < 1e-14 * psi.norm());
        const cd lhs = theta.apply(psi).dot(theta.apply(phi));
        const cd rhs = phi.dot(psi);
        CHECK(std::abs(lhs - rhs) < 1e-12 * psi.norm() * phi.norm());
    }
    CHECK_THROWS_AS((TimeReversalOp(kSpinless8)), std::invalid_argument);
}

TEST_CASE("disorder contract") {
    const auto base = build_kane_mele({{1.0, 0.1, 0.0}, 0.05, 0.0, 0}, kOpen8);
    SUBCASE("w = 0 returns the input unchanged") {
        const auto same = add_disorder(base, 0.0, 99);
        CHECK((same.matrix - base.matrix).norm() == 0.0);
    }
    SUBCASE("shifts are diagonal, bounded, and uniform over channels") {
        const LatticeSpec spec{4, 4, Boundary::Open, 2, 2};
        const auto h0 = build_kane_mele({{1.0, 0.1, 0.0}, 0.0, 0.0, 0}, spec);
        const auto h1 = add_disorder(h0, 1.0, 7);
        const Eigen::MatrixXcd diff = h1.matrix - h0.matrix;
        CHECK((diff - Eigen::MatrixXcd(diff.diagonal().asDiagonal())).norm() == 0.0);
        StateIndexer idx(spec);
        for (int n2 = 0; n2 < 4; ++n2)
            for (int n1 = 0; n1 < 4; ++n1) {
                const cd v = diff(idx.flat(n1, n2, 0, 0), idx.flat(n1, n2, 0, 0));
                CHECK(std::abs(v) <= 0.5);
                CHECK(v.imag() == 0.0);
                for (int mu = 0; mu < 2; ++mu)
                    for (int s = 0; s < 2; ++s)
                        CHECK(diff(idx.flat(n1, n2, mu, s), idx.flat(n1, n2, mu, s)) == v);
            }
    }
    SUBCASE("deterministic given the seed") {
        const auto a = add_disorder(base, 1.0, 7);
        const auto b = add_disorder(base, 1.0, 7);
        CHECK((a.matrix - b.matrix).norm() == 0.0);
    }
    SUBCASE("negative amplitude is rejected") {
        CHECK_THROWS_AS(add_disorder(base, -0.1, 7), std::invalid_argument);
    }
    SUBCASE("disorder preserves odd time reversal") {
        const TimeReversalOp theta(kOpen8);
        CHECK(check_odd_trs(add_disorder(base, 1.2, 17), theta));
    }
}

TEST_CASE("kramers degeneracy of the periodic kane-mele spectrum") {
    const LatticeSpec spec{12, 12, Boundary::Periodic, 2, 2};
    const auto h = build_kane_mele({{1.0, 0.1, 0.0}, 0.0, 0.0, 0}, spec);
    const auto d = diagonalize(h);
    for (int k = 0; k + 1 < d.eigenvalues.size(); k += 2)
        CHECK(d.eigenvalues[k + 1] - d.eigenvalues[k] < 1e-9);
}

TEST_CASE("kramers degeneracy survives rashba and disorder on an open box") {
    const auto h = build_kane_mele({{1.0, 0.1, 0.1}, 0.08, 0.4, 21}, kOpen8);
    const auto d = diagonalize(h);
    for (int k = 0; k + 1 < d.eigenvalues.size(); k += 2)
        CHECK(d.eigenvalues[k + 1] - d.eigenvalues[k] < 1e-9);
}

TEST_CASE("model preconditions") {
    CHECK_THROWS_AS(build_haldane({1.0, 0.1, 0.0}, LatticeSpec{8, 8, Boundary::Open, 3, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_kane_mele({}, kSpinless8), std::invalid_argument);
}
