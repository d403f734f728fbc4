#include "fluxindex/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fluxindex {

void LatticeSpec::validate() const {
    if (l1 < 2 || l2 < 2)
        throw std::invalid_argument("LatticeSpec: box must be at least 2x2");
    if (orbitals < 1)
        throw std::invalid_argument("LatticeSpec: orbitals must be positive");
    if (spins != 1 && spins != 2)
        throw std::invalid_argument("LatticeSpec: spins must be 1 or 2");
}

namespace {

bool is_half_integer(double x) {
    return std::abs(x + 0.5 - std::round(x + 0.5)) < 1e-12;
}

}  // namespace

DualPoint DualPoint::checked(double a1, double a2) {
    if (!is_half_integer(a1) || !is_half_integer(a2))
        throw std::invalid_argument("DualPoint: coordinates must be half-integers");
    return DualPoint{a1, a2};
}

double interior_distance(const LatticeSpec& spec, const DualPoint& a) {
    return std::min(std::min(a.a1, spec.l1 - 1 - a.a1),
                    std::min(a.a2, spec.l2 - 1 - a.a2));
}

StateIndexer::StateIndexer(LatticeSpec spec) : spec_(spec) { spec_.validate(); }

int StateIndexer::site(int n1, int n2) const {
    if (n1 < 0 || n1 >= spec_.l1 || n2 < 0 || n2 >= spec_.l2)
        throw std::out_of_range("StateIndexer: site (" + std::to_string(n1) + "," +
                                std::to_string(n2) + ") outside box");
    return n2 * spec_.l1 + n1;
}

int StateIndexer::flat(int n1, int n2, int orbital, int spin) const {
    if (orbital < 0 || orbital >= spec_.orbitals)
        throw std::out_of_range("StateIndexer: orbital out of range");
    if (spin < 0 || spin >= spec_.spins)
        throw std::out_of_range("StateIndexer: spin out of range");
    return (site(n1, n2) * spec_.orbitals + orbital) * spec_.spins + spin;
}

StateIndexer::State StateIndexer::unflat(int index) const {
    if (index < 0 || index >= dim())
        throw std::out_of_range("StateIndexer: flat index out of range");
    const int spin = index % spec_.spins;
    index /= spec_.spins;
    const int orbital = index % spec_.orbitals;
    const int s = index / spec_.orbitals;
    return State{s % spec_.l1, s / spec_.l1, orbital, spin};
}

int StateIndexer::neighbor(int n1, int n2, int dn1, int dn2, int orbital, int spin) const {
    int m1 = n1 + dn1;
    int m2 = n2 + dn2;
    if (spec_.boundary == Boundary::Periodic) {
        m1 = ((m1 % spec_.l1) + spec_.l1) % spec_.l1;
        m2 = ((m2 % spec_.l2) + spec_.l2) % spec_.l2;
    } else if (m1 < 0 || m1 >= spec_.l1 || m2 < 0 || m2 >= spec_.l2) {
        return -1;
    }
    return flat(m1, m2, orbital, spin);
}

RegionMask::RegionMask(LatticeSpec spec, std::vector<char> mask)
    : spec_(spec), mask_(std::move(mask)) {
    site_count_ = static_cast<int>(std::count(mask_.begin(), mask_.end(), char(1)));
}

RegionMask RegionMask::full(const LatticeSpec& spec) {
    spec.validate();
    return RegionMask(spec, std::vector<char>(spec.sites(), 1));
}

RegionMask RegionMask::rectangle(const LatticeSpec& spec, int n1_0, int n2_0, int width,
                                 int height) {
    spec.validate();
    if (width <= 0 || height <= 0 || n1_0 < 0 || n2_0 < 0 || n1_0 + width > spec.l1 ||
        n2_0 + height > spec.l2)
        throw std::invalid_argument("RegionMask: rectangle does not fit in box");
    std::vector<char> mask(spec.sites(), 0);
    for (int n2 = n2_0; n2 < n2_0 + height; ++n2)
        for (int n1 = n1_0; n1 < n1_0 + width; ++n1) mask[n2 * spec.l1 + n1] = 1;
    return RegionMask(spec, std::move(mask));
}

RegionMask RegionMask::centered_square(const LatticeSpec& spec, int side) {
    return rectangle(spec, (spec.l1 - side) / 2, (spec.l2 - side) / 2, side, side);
}

bool RegionMask::contains(int n1, int n2) const {
    if (n1 < 0 || n1 >= spec_.l1 || n2 < 0 || n2 >= spec_.l2) return false;
    return mask_[n2 * spec_.l1 + n1] != 0;
}

std::vector<DualPoint> interior_dual_points(const LatticeSpec& spec, int margin) {
    spec.validate();
    if (margin < 0) throw std::invalid_argument("interior_dual_points: margin must be >= 0");
    std::vector<DualPoint> points;
    for (int j = 0; j + 1 < spec.l2; ++j) {
        for (int i = 0; i + 1 < spec.l1; ++i) {
            DualPoint a{i + 0.5, j + 0.5};
            if (interior_distance(spec, a) >= margin + 0.5) points.push_back(a);
        }
    }
    return points;
}

std::vector<DualPoint> central_dual_points(const LatticeSpec& spec, int count) {
    auto points = interior_dual_points(spec, 0);
    const double c1 = (spec.l1 - 1) / 2.0;
    const double c2 = (spec.l2 - 1) / 2.0;
    std::stable_sort(points.begin(), points.end(), [&](const DualPoint& x, const DualPoint& y) {
        const double dx = std::max(std::abs(x.a1 - c1), std::abs(x.a2 - c2));
        const double dy = std::max(std::abs(y.a1 - c1), std::abs(y.a2 - c2));
        return dx < dy;
    });
    if (count < 0 || count > static_cast<int>(points.size()))
        throw std::invalid_argument("central_dual_points: not enough interior dual points");
    points.resize(count);
    return points;
}

DualPoint central_dual_point(const LatticeSpec& spec) { return central_dual_points(spec, 1)[0]; }

}  // namespace fluxindex
