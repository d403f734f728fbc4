#ifndef FLUXINDEX_LATTICE_HPP
#define FLUXINDEX_LATTICE_HPP

#include <vector>

namespace fluxindex {

enum class Boundary { Open, Periodic };

/* Finite rectangular truncation of the square lattice: sites
   n = (n1, n2) with 0 <= n1 < L1, 0 <= n2 < L2, each carrying
   `orbitals` orbitals and `spins` spin components. */
struct LatticeSpec {
    int l1 = 2;
    int l2 = 2;
    Boundary boundary = Boundary::Open;
    int orbitals = 2;
    int spins = 2;

    int sites() const { return l1 * l2; }
    int dim() const { return l1 * l2 * orbitals * spins; }
    void validate() const;  // throws std::invalid_argument
};

/* Point of the dual lattice: both coordinates are half-integers
   (the dual lattice is the site lattice shifted by (1/2, 1/2)). */
struct DualPoint {
    double a1 = 0.5;
    double a2 = 0.5;

    static DualPoint checked(double a1, double a2);
    bool operator==(const DualPoint&) const = default;
};

// Distance from a dual point to the hull of the open box,
// measured as min(a1, L1-1-a1, a2, L2-1-a2).
double interior_distance(const LatticeSpec& spec, const DualPoint& a);

/* Bijection (site, orbital, spin) <-> flat Hilbert-space index.
   Layout is site-major (n2 slow, n1 fast), then orbital, then spin. */
class StateIndexer {
public:
    explicit StateIndexer(LatticeSpec spec);

    struct State {
        int n1, n2, orbital, spin;
        bool operator==(const State&) const = default;
    };

    int flat(int n1, int n2, int orbital, int spin) const;
    State unflat(int index) const;

    int site(int n1, int n2) const;
    int dim() const { return spec_.dim(); }
    int internal_dim() const { return spec_.orbitals * spec_.spins; }
    const LatticeSpec& spec() const { return spec_; }

    // Flat index of the state displaced by (dn1, dn2). Periodic boundary
    // wraps; open boundary returns -1 when the target leaves the box.
    int neighbor(int n1, int n2, int dn1, int dn2, int orbital, int spin) const;

private:
    LatticeSpec spec_;
};

/* Characteristic function of a sublattice: one 0/1 value per site,
   shared by all orbital/spin channels at that site. */
class RegionMask {
public:
    static RegionMask full(const LatticeSpec& spec);
    static RegionMask rectangle(const LatticeSpec& spec, int n1_0, int n2_0, int width, int height);
    static RegionMask centered_square(const LatticeSpec& spec, int side);

    bool contains(int n1, int n2) const;
    int site_count() const { return site_count_; }
    const LatticeSpec& spec() const { return spec_; }

private:
    RegionMask(LatticeSpec spec, std::vector<char> mask);
    LatticeSpec spec_;
    std::vector<char> mask_;
    int site_count_;
};

// All dual points with interior_distance >= margin + 1/2, ordered
// lexicographically (a2 slow, a1 fast). Margin 0 yields every plaquette
// center strictly inside the box hull.
std::vector<DualPoint> interior_dual_points(const LatticeSpec& spec, int margin);

// The `count` dual points closest to the box center, ties broken
// lexicographically; count = 1 gives the central flux anchor.
std::vector<DualPoint> central_dual_points(const LatticeSpec& spec, int count);
DualPoint central_dual_point(const LatticeSpec& spec);

}  // namespace fluxindex

#endif
