#include "doctest.h"

#include <cmath>
#include <complex>

#include "fluxindex/errors.hpp"
#include "fluxindex/model.hpp"
#include "fluxindex/spectral.hpp"

using namespace fluxindex;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd diag2(double a, double b) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

}  // namespace

TEST_CASE("diagonalize on trivial inputs") {
    SUBCASE("zero matrix") {
        const auto d = diagonalize(Eigen::MatrixXcd::Zero(8, 8));
        CHECK(d.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
        CHECK((d.eigenvectors.adjoint() * d.eigenvectors - Eigen::MatrixXcd::Identity(8, 8))
                  .norm() < 1e-10);
    }
    SUBCASE("diag(-1, 1)") {
        const auto d = diagonalize(diag2(1.0, -1.0));
        CHECK(d.eigenvalues[0] == doctest::Approx(-1.0));
        CHECK(d.eigenvalues[1] == doctest::Approx(1.0));
    }
    SUBCASE("non-hermitian input rejected") {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
        m(0, 1) = 1.0;
        CHECK_THROWS_AS(diagonalize(m), std::invalid_argument);
    }
}

TEST_CASE("eigendecomposition invariants on a disordered kane-mele box") {
    const LatticeSpec spec{8, 8, Boundary::Open, 2, 2};
    const auto h = build_kane_mele({{1.0, 0.1, 0.1}, 0.05, 0.3, 5}, spec);
    const auto d = diagonalize(h);
    const double hnorm = std::max(std::abs(d.eigenvalues[0]),
                                  std::abs(d.eigenvalues[d.eigenvalues.size() - 1]));
    CHECK((h.matrix * d.eigenvectors - d.eigenvectors * d.eigenvalues.asDiagonal()).norm() <=
          1e-9 * h.dim() * hnorm);
    CHECK((d.eigenvectors.adjoint() * d.eigenvectors -
           Eigen::MatrixXcd::Identity(h.dim(), h.dim()))
              .norm() < 1e-10);
    for (int i = 0; i + 1 < d.eigenvalues.size(); ++i)
        CHECK(d.eigenvalues[i] <= d.eigenvalues[i + 1]);
}

TEST_CASE("haldane spectrum is symmetric under E -> -E at lambda_v = 0") {
    const LatticeSpec spec{6, 6, Boundary::Periodic, 2, 1};
    const auto d = diagonalize(build_haldane({1.0, 0.1, 0.0}, spec));
    const int n = static_cast<int>(d.eigenvalues.size());
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(d.eigenvalues[i] + d.eigenvalues[n - 1 - i]) < 1e-10);
}

TEST_CASE("fermi projection") {
    SUBCASE("diag(-1,1) at e_f = 0") {
        const auto p = fermi_projection(diagonalize(diag2(-1.0, 1.0)), 0.0);
        CHECK(p.rank == 1);
        CHECK(std::abs(p.matrix(0, 0) - 1.0) < 1e-14);
        CHECK(std::abs(p.matrix(1, 1)) < 1e-14);
    }
    SUBCASE("projector algebra and trace on a gapped model") {
        const LatticeSpec spec{8, 8, Boundary::Open, 2, 2};
        const auto h = build_kane_mele({{1.0, 0.1, 0.0}, 0.05, 0.2, 2}, spec);
        const auto p = fermi_projection(diagonalize(h), 0.0);
        CHECK((p.matrix * p.matrix - p.matrix).norm() < 1e-10);
        CHECK((p.matrix - p.matrix.adjoint()).norm() < 1e-10);
        CHECK(std::abs(p.matrix.trace().real() - p.rank) < 1e-8);
        CHECK((h.matrix * p.matrix - p.matrix * h.matrix).norm() <
              1e-9 * hermitian_spectral_norm(h.matrix));
    }
    SUBCASE("half filling on the periodic kane-mele box") {
        const LatticeSpec spec{12, 12, Boundary::Periodic, 2, 2};
        const auto h = build_kane_mele({{1.0, 0.1, 0.0}, 0.0, 0.0, 0}, spec);
        const auto p = fermi_projection(diagonalize(h), 0.0);
        CHECK(p.rank == spec.dim() / 2);
    }
    SUBCASE("fermi level on the spectrum is rejected") {
        CHECK_THROWS_AS(fermi_projection(diagonalize(diag2(-1.0, 1.0)), 1.0), GapClosedError);
    }
}

TEST_CASE("time reversal symmetry of the fermi projection") {
    const LatticeSpec spec{8, 8, Boundary::Open, 2, 2};
    const TimeReversalOp theta(spec);
    const auto h = build_kane_mele({{1.0, 0.1, 0.1}, 0.06, 0.3, 9}, spec);
    REQUIRE(check_odd_trs(h, theta));
    const auto p = fermi_projection(diagonalize(h), 0.0);
    CHECK((theta.conjugate(p.matrix) - p.matrix).norm() < 1e-9);
}

TEST_CASE("spectral gap report") {
    SUBCASE("diag(-1,1)") {
        const auto g = spectral_gap(diagonalize(diag2(-1.0, 1.0)), 0.0);
        CHECK(g.gap == doctest::Approx(2.0));
        CHECK(g.highest_occupied == doctest::Approx(-1.0));
        CHECK(g.lowest_empty == doctest::Approx(1.0));
    }
    SUBCASE("haldane gap equals twice the dirac mass when the momenta are on-grid") {
        const LatticeSpec spec{12, 12, Boundary::Periodic, 2, 1};
        const auto g = spectral_gap(diagonalize(build_haldane({1.0, 0.1, 0.0}, spec)), 0.0);
        CHECK(std::abs(g.gap - 0.6 * std::sqrt(3.0)) < 1e-6);
    }
    SUBCASE("gap closes at t' = 0") {
        const LatticeSpec spec{12, 12, Boundary::Periodic, 2, 1};
        const auto g = spectral_gap(diagonalize(build_haldane({1.0, 0.0, 0.0}, spec)), 0.0);
        CHECK(g.gap < 1e-9);
    }
}

TEST_CASE("projection perturbation norms") {
    const LatticeSpec spec{8, 8, Boundary::Open, 2, 2};
    const auto h = build_kane_mele({{1.0, 0.1, 0.0}, 0.05, 0.0, 0}, spec);
    SUBCASE("zero perturbation") {
        const Hamiltonian zero{spec, Eigen::MatrixXcd::Zero(spec.dim(), spec.dim())};
        const auto [pd, dn] = projection_perturbation_norm(h, zero, 0.0);
        CHECK(pd == 0.0);
        CHECK(dn == 0.0);
    }
    SUBCASE("weak disorder moves the projection by less than a full state") {
        const auto disordered = add_disorder(h, 0.05, 3);
        const Hamiltonian dh{spec, disordered.matrix - h.matrix};
        const auto [pd, dn] = projection_perturbation_norm(h, dh, 0.0);
        CHECK(pd < 1.0);
        CHECK(pd > 0.0);
        CHECK(dn <= 0.025 + 1e-12);
    }
    SUBCASE("halving the perturbation roughly halves the drift") {
        const auto disordered = add_disorder(h, 0.05, 3);
        const Hamiltonian dh{spec, disordered.matrix - h.matrix};
        const Hamiltonian dh_half{spec, 0.5 * dh.matrix};
        const auto [pd_full, dn_full] = projection_perturbation_norm(h, dh, 0.0);
        const auto [pd_half, dn_half] = projection_perturbation_norm(h, dh_half, 0.0);
        CHECK(dn_half == doctest::Approx(0.5 * dn_full));
        CHECK(pd_half / pd_full > 0.3);
        CHECK(pd_half / pd_full < 0.7);
    }
}
