#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "fluxindex/lattice.hpp"

using namespace fluxindex;

TEST_CASE("flat index layout is site-major, then orbital, then spin") {
    StateIndexer idx(LatticeSpec{2, 2, Boundary::Open, 2, 2});
    CHECK(idx.flat(0, 0, 0, 0) == 0);
    CHECK(idx.flat(0, 0, 0, 1) == 1);
    CHECK(idx.flat(0, 0, 1, 0) == 2);
    CHECK(idx.flat(1, 0, 0, 0) == 4);
    CHECK(idx.flat(0, 1, 0, 0) == 8);
}

TEST_CASE("indexing is a bijection on the full 2x2 box") {
    StateIndexer idx(LatticeSpec{2, 2, Boundary::Open, 2, 2});
    REQUIRE(idx.dim() == 2 * 2 * 2 * 2);
    for (int i = 0; i < idx.dim(); ++i) {
        const auto st = idx.unflat(i);
        CHECK(idx.flat(st.n1, st.n2, st.orbital, st.spin) == i);
    }
    for (int n2 = 0; n2 < 2; ++n2)
        for (int n1 = 0; n1 < 2; ++n1)
            for (int mu = 0; mu < 2; ++mu)
                for (int s = 0; s < 2; ++s) {
                    const auto st = idx.unflat(idx.flat(n1, n2, mu, s));
                    CHECK(st == StateIndexer::State{n1, n2, mu, s});
                }
}

TEST_CASE("hilbert dimension of the 4x4 Kane-Mele box") {
    CHECK(LatticeSpec{4, 4, Boundary::Open, 2, 2}.dim() == 64);
}

TEST_CASE("out-of-range coordinates are rejected") {
    StateIndexer idx(LatticeSpec{4, 4, Boundary::Open, 2, 2});
    CHECK_THROWS_AS(idx.flat(4, 0, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(idx.flat(0, -1, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(idx.flat(0, 0, 2, 0), std::out_of_range);
    CHECK_THROWS_AS(idx.flat(0, 0, 0, 2), std::out_of_range);
    CHECK_THROWS_AS(idx.unflat(64), std::out_of_range);
}

TEST_CASE("neighbor lookup honors the boundary") {
    StateIndexer open(LatticeSpec{4, 4, Boundary::Open, 2, 2});
    CHECK(open.neighbor(3, 0, 1, 0, 0, 0) == -1);
    CHECK(open.neighbor(3, 0, -1, 0, 0, 0) == open.flat(2, 0, 0, 0));
    StateIndexer periodic(LatticeSpec{4, 4, Boundary::Periodic, 2, 2});
    CHECK(periodic.neighbor(3, 0, 1, 0, 0, 0) == periodic.flat(0, 0, 0, 0));
    CHECK(periodic.neighbor(0, 0, -1, -1, 1, 1) == periodic.flat(3, 3, 1, 1));
}

TEST_CASE("dual points are half-integers and never lattice sites") {
    CHECK_THROWS_AS(DualPoint::checked(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(DualPoint::checked(0.25, 0.5), std::invalid_argument);
    const auto a = DualPoint::checked(-0.5, 3.5);
    CHECK(a.a1 == -0.5);
    for (const auto& p : interior_dual_points(LatticeSpec{6, 6, Boundary::Open, 2, 2}, 0)) {
        CHECK(std::abs(p.a1 - std::round(p.a1)) == 0.5);
        CHECK(std::abs(p.a2 - std::round(p.a2)) == 0.5);
    }
}

TEST_CASE("interior dual point counts") {
    CHECK(interior_dual_points(LatticeSpec{4, 4, Boundary::Open, 2, 2}, 0).size() == 9);

    const auto single = interior_dual_points(LatticeSpec{2, 2, Boundary::Open, 2, 2}, 0);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == DualPoint{0.5, 0.5});

    const auto central = interior_dual_points(LatticeSpec{8, 8, Boundary::Open, 2, 2}, 3);
    REQUIRE(central.size() == 1);
    CHECK(central[0] == DualPoint{3.5, 3.5});

    CHECK(interior_dual_points(LatticeSpec{4, 4, Boundary::Open, 2, 2}, 10).empty());
}

TEST_CASE("central dual points are deterministic and centered") {
    const LatticeSpec spec{12, 12, Boundary::Open, 2, 1};
    CHECK(central_dual_point(spec) == DualPoint{5.5, 5.5});
    const auto three = central_dual_points(spec, 3);
    REQUIRE(three.size() == 3);
    CHECK(three[0] == DualPoint{5.5, 5.5});
    for (const auto& a : three) CHECK(interior_distance(spec, a) >= 3.0);
}

TEST_CASE("region masks") {
    const LatticeSpec spec{6, 6, Boundary::Open, 2, 2};
    CHECK(RegionMask::full(spec).site_count() == 36);
    const auto rect = RegionMask::rectangle(spec, 1, 2, 3, 2);
    CHECK(rect.site_count() == 6);
    CHECK(rect.contains(1, 2));
    CHECK(rect.contains(3, 3));
    CHECK(!rect.contains(0, 2));
    CHECK(!rect.contains(1, 4));
    CHECK(RegionMask::centered_square(spec, 2).site_count() == 4);
    CHECK_THROWS_AS(RegionMask::rectangle(spec, 5, 5, 3, 1), std::invalid_argument);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS((LatticeSpec{1, 4, Boundary::Open, 2, 2}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((LatticeSpec{4, 4, Boundary::Open, 0, 2}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((LatticeSpec{4, 4, Boundary::Open, 2, 3}).validate(), std::invalid_argument);
}
