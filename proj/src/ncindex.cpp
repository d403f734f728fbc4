#include "fluxindex/ncindex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "fluxindex/errors.hpp"

namespace fluxindex {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

cd unit_phase(double x1, double x2, const DualPoint& a) {
    const cd z(x1 - a.a1, x2 - a.a2);
    return z / std::abs(z);
}

// Clusters of nearly equal values in an ascending list; gap-based
// agglomeration at tolerance tol.
struct Cluster {
    double centroid;
    int count;
};

std::vector<Cluster> cluster_values(const std::vector<double>& sorted, double tol) {
    std::vector<Cluster> out;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        double sum = sorted[i];
        while (j < sorted.size() && sorted[j] - sorted[j - 1] < tol) sum += sorted[j++];
        out.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i)});
        i = j;
    }
    return out;
}

// Indices of up to max_count in-window eigenvalues, spread over the window.
std::vector<int> sample_indices(const Eigen::VectorXd& eigs, std::pair<double, double> window,
                                int max_count) {
    std::vector<int> in_window;
    for (int i = 0; i < eigs.size(); ++i) {
        const double mag = std::abs(eigs[i]);
        if (mag > window.first && mag < window.second) in_window.push_back(i);
    }
    if (static_cast<int>(in_window.size()) <= max_count) return in_window;
    std::vector<int> picked;
    for (int k = 0; k < max_count; ++k)
        picked.push_back(in_window[k * (in_window.size() - 1) / (max_count - 1)]);
    picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
    return picked;
}

}  // namespace

FluxUnitary::FluxUnitary(const LatticeSpec& spec, DualPoint a) : spec_(spec), a_(a) {
    spec.validate();
    if (spec.boundary != Boundary::Open)
        throw std::invalid_argument("FluxUnitary: flux insertion requires an open boundary");
    DualPoint::checked(a.a1, a.a2);
    StateIndexer idx(spec);
    diag_.resize(spec.dim());
    for (int n2 = 0; n2 < spec.l2; ++n2) {
        for (int n1 = 0; n1 < spec.l1; ++n1) {
            const cd phase = unit_phase(n1, n2, a_);
            for (int mu = 0; mu < spec.orbitals; ++mu)
                for (int s = 0; s < spec.spins; ++s) diag_[idx.flat(n1, n2, mu, s)] = phase;
        }
    }
}

std::complex<double> FluxUnitary::site_phase(int n1, int n2) const {
    return unit_phase(n1, n2, a_);
}

Eigen::VectorXcd FluxUnitary::apply(const Eigen::VectorXcd& phi) const {
    if (phi.size() != diag_.size())
        throw std::invalid_argument("FluxUnitary: dimension mismatch");
    return diag_.cwiseProduct(phi);
}

Eigen::VectorXcd FluxUnitary::apply_adjoint(const Eigen::VectorXcd& phi) const {
    if (phi.size() != diag_.size())
        throw std::invalid_argument("FluxUnitary: dimension mismatch");
    return diag_.conjugate().cwiseProduct(phi);
}

Eigen::MatrixXcd FluxUnitary::sandwich(const Eigen::MatrixXcd& m) const {
    if (m.rows() != diag_.size() || m.cols() != diag_.size())
        throw std::invalid_argument("FluxUnitary: dimension mismatch");
    return diag_.asDiagonal() * m * diag_.conjugate().asDiagonal();
}

Eigen::MatrixXcd PairProjectionOps::fermi_projection() const {
    Eigen::MatrixXcd p = 0.5 * (a_op - b_op);
    p.diagonal().array() += 0.5;
    return p;
}

PairProjectionOps build_pair_ops(const FermiProjection& p, const FluxUnitary& u) {
    const int n = static_cast<int>(p.matrix.rows());
    if (n != u.diagonal().size())
        throw std::invalid_argument("build_pair_ops: dimension mismatch");
    PairProjectionOps ops;
    ops.a_op.resize(n, n);
    ops.b_op.resize(n, n);
    const auto& d = u.diagonal();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const cd f = d[i] * std::conj(d[j]);
            ops.a_op(i, j) = p.matrix(i, j) * (1.0 - f);
            ops.b_op(i, j) = -p.matrix(i, j) * (1.0 + f);
        }
        ops.b_op(j, j) += 1.0;
    }
    return ops;
}

nlohmann::json IndexReport::to_json() const {
    return nlohmann::json{{"n_plus", n_plus},
                          {"n_minus", n_minus},
                          {"trace_a3", trace_a3},
                          {"chern", chern},
                          {"z2", z2},
                          {"residual", residual},
                          {"delta", delta},
                          {"ambiguous_window", ambiguous_window}};
}

std::vector<IndexReport> index_report_multi(const PairProjectionOps& ops,
                                            std::span<const double> deltas) {
    for (double delta : deltas)
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("index_report: delta must lie in (0, 1)");

    const Eigen::VectorXd eigs = hermitian_eigenvalues(ops.a_op);
    const int n = static_cast<int>(eigs.size());
    if (n > 0 && (eigs[0] < -1.0 - 1e-9 || eigs[n - 1] > 1.0 + 1e-9))
        throw std::runtime_error("index_report: spectrum of A leaves [-1, 1]");

    // Two independent routes to Tr A^3: direct product trace and sum of
    // eigenvalue cubes; disagreement flags a numerical fault.
    const Eigen::MatrixXcd a2 = ops.a_op * ops.a_op;
    const cd trace_direct = (a2.array() * ops.a_op.array().conjugate()).sum();
    const double trace_eig = eigs.array().cube().sum();
    if (std::abs(trace_direct.imag()) > 1e-9)
        throw std::runtime_error("index_report: Tr A^3 has imaginary residue " +
                                 std::to_string(trace_direct.imag()));
    if (std::abs(trace_direct.real() - trace_eig) > 1e-8)
        throw std::runtime_error("index_report: Tr A^3 routes disagree: " +
                                 std::to_string(trace_direct.real()) + " vs " +
                                 std::to_string(trace_eig));

    std::vector<IndexReport> reports;
    reports.reserve(deltas.size());
    for (double delta : deltas) {
        IndexReport r;
        r.eigenvalues = eigs;
        r.delta = delta;
        for (int i = 0; i < n; ++i) {
            if (eigs[i] >= 1.0 - delta) ++r.n_plus;
            if (eigs[i] <= -1.0 + delta) ++r.n_minus;
            if (std::abs(eigs[i] - (1.0 - delta)) < 1e-3 ||
                std::abs(eigs[i] - (-1.0 + delta)) < 1e-3)
                r.ambiguous_window = true;
        }
        r.trace_a3 = trace_direct.real();
        r.chern = static_cast<int>(std::lround(r.trace_a3));
        r.z2 = r.n_plus % 2;
        r.residual = std::abs(r.trace_a3 - r.chern);
        reports.push_back(std::move(r));
    }
    return reports;
}

IndexReport index_report(const PairProjectionOps& ops, double delta) {
    return index_report_multi(ops, std::span<const double>(&delta, 1))[0];
}

bool susy_pairing_check(const PairProjectionOps& ops, std::pair<double, double> window,
                        double tol) {
    if (!(0.0 < window.first && window.first < window.second && window.second < 1.0))
        throw std::invalid_argument("susy_pairing_check: window must satisfy 0 < lo < hi < 1");
    const EigenDecomposition d = diagonalize(ops.a_op);

    // Spectral pairing: multiplicities of +lambda and -lambda clusters match.
    // Values within tol of the window edges are excluded on both sides.
    std::vector<double> pos, neg;
    for (int i = 0; i < d.eigenvalues.size(); ++i) {
        const double lam = d.eigenvalues[i];
        if (std::abs(lam) <= window.first + tol || std::abs(lam) >= window.second - tol) continue;
        (lam > 0 ? pos : neg).push_back(std::abs(lam));
    }
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());
    if (pos.size() != neg.size()) return false;
    for (std::size_t i = 0; i < pos.size(); ++i)
        if (std::abs(pos[i] - neg[i]) > tol) return false;

    // Algebraic checks on sampled eigenvectors.
    for (int i : sample_indices(d.eigenvalues, window, 8)) {
        const double lam = d.eigenvalues[i];
        const Eigen::VectorXcd phi = d.eigenvectors.col(i);
        const Eigen::VectorXcd bphi = ops.b_op * phi;
        const Eigen::VectorXcd b2phi = ops.b_op * bphi;
        if ((b2phi - (1.0 - lam * lam) * phi).norm() > tol) return false;
        if ((ops.a_op * bphi + lam * bphi).norm() > tol * bphi.norm()) return false;
    }
    return true;
}

bool trs_even_degeneracy_check(const PairProjectionOps& ops, const TimeReversalOp& theta,
                               const FluxUnitary& u, std::pair<double, double> window,
                               double tol) {
    if (!(0.0 < window.first && window.first < window.second && window.second < 1.0))
        throw std::invalid_argument("trs_even_degeneracy_check: bad window");
    if (theta.spec().dim() != ops.dim() || u.diagonal().size() != ops.dim())
        throw std::invalid_argument("trs_even_degeneracy_check: dimension mismatch");

    const Eigen::MatrixXcd p = ops.fermi_projection();
    if ((theta.conjugate(p) - p).norm() > 1e-9 * ops.dim())
        throw std::invalid_argument(
            "trs_even_degeneracy_check: Fermi projection is not odd time-reversal symmetric");

    const EigenDecomposition d = diagonalize(ops.a_op);

    std::vector<double> in_window;
    for (int i = 0; i < d.eigenvalues.size(); ++i) {
        const double mag = std::abs(d.eigenvalues[i]);
        if (mag > window.first + tol && mag < window.second - tol)
            in_window.push_back(d.eigenvalues[i]);
    }
    for (const Cluster& c : cluster_values(in_window, tol))
        if (c.count % 2 != 0) return false;

    for (int i : sample_indices(d.eigenvalues, window, 8)) {
        const double lam = d.eigenvalues[i];
        const Eigen::VectorXcd phi = d.eigenvectors.col(i);
        // Kramers-type partner U_a (B phi)^Theta: same eigenvalue, orthogonal.
        const Eigen::VectorXcd psi = u.apply(theta.apply(ops.b_op * phi));
        if ((ops.a_op * psi - lam * psi).norm() > tol * psi.norm()) return false;
        if (std::abs(phi.dot(psi)) > tol * phi.norm() * psi.norm()) return false;
        // U_a phi^Theta inverts the eigenvalue.
        const Eigen::VectorXcd chi = u.apply(theta.apply(phi));
        if ((ops.a_op * chi + lam * chi).norm() > tol * chi.norm()) return false;
    }
    return true;
}

bool check_theta_conditions(const TimeReversalOp& theta, const FluxUnitary& u) {
    if (theta.spec().dim() != u.diagonal().size())
        throw std::invalid_argument("check_theta_conditions: dimension mismatch");
    const int n = static_cast<int>(u.diagonal().size());

    // U^Theta U_a (U^Theta)^* = U_a: the flux phase must be spin-independent,
    // i.e. invariant under the spin-flip permutation.
    const auto& d = u.diagonal();
    for (int i = 0; i < n; ++i)
        if (std::abs(d[i] - d[i ^ 1]) > 1e-14) return false;

    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> g;
    auto random_vec = [&] {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i) v[i] = cd(g(rng), g(rng));
        return v;
    };
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXcd psi = random_vec();
        if ((theta.apply(theta.apply(psi)) + psi).norm() > 1e-14 * psi.norm()) return false;
    }
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXcd psi = random_vec();
        const Eigen::VectorXcd phi = random_vec();
        const cd lhs = theta.apply(psi).dot(theta.apply(phi));
        const cd rhs = phi.dot(psi);
        if (std::abs(lhs - rhs) > 1e-12 * psi.norm() * phi.norm()) return false;
    }
    return true;
}

bool flux_position_invariance(const Hamiltonian& h, double e_f, std::span<const DualPoint> a_list,
                              double delta) {
    if (a_list.empty()) throw std::invalid_argument("flux_position_invariance: empty anchor list");
    const double margin = std::min(h.spec.l1, h.spec.l2) / 4.0;
    for (const DualPoint& a : a_list)
        if (interior_distance(h.spec, a) < margin)
            throw std::invalid_argument("flux_position_invariance: anchor violates interior margin");

    const auto decomp = diagonalize(h);
    const auto p = fermi_projection(decomp, e_f);
    int chern = 0, z2 = 0;
    bool first = true;
    for (const DualPoint& a : a_list) {
        const auto report = index_report(build_pair_ops(p, FluxUnitary(h.spec, a)), delta);
        if (first) {
            chern = report.chern;
            z2 = report.z2;
            first = false;
        } else if (report.chern != chern || report.z2 != z2) {
            return false;
        }
    }
    return true;
}

std::complex<double> connes_area_sum(Eigen::Vector2i u, Eigen::Vector2i v, Eigen::Vector2i w,
                                     int radius) {
    const double duv = (u - v).cast<double>().norm();
    const double dvw = (v - w).cast<double>().norm();
    const double dwu = (w - u).cast<double>().norm();
    const double max_dist = std::max({duv, dvw, dwu});
    if (radius < 8 * max_dist)
        throw std::invalid_argument("connes_area_sum: radius must be >= 8 * max pairwise distance");

    cd sum(0.0, 0.0);
    const double r2 = static_cast<double>(radius) * radius;
    for (int i = -radius - 1; i <= radius; ++i) {
        for (int j = -radius - 1; j <= radius; ++j) {
            const DualPoint a{i + 0.5, j + 0.5};
            if (a.a1 * a.a1 + a.a2 * a.a2 > r2) continue;
            const cd pu = unit_phase(u.x(), u.y(), a);
            const cd pv = unit_phase(v.x(), v.y(), a);
            const cd pw = unit_phase(w.x(), w.y(), a);
            const cd tuv = 1.0 - pu * std::conj(pv);
            const cd tvw = 1.0 - pv * std::conj(pw);
            const cd twu = 1.0 - pw * std::conj(pu);
            sum += tuv * tvw * twu;
        }
    }
    return sum;
}

std::complex<double> connes_area_target(Eigen::Vector2i u, Eigen::Vector2i v, Eigen::Vector2i w) {
    const double cross = static_cast<double>(v.y() - w.y()) * (w.x() - u.x()) -
                         static_cast<double>(v.x() - w.x()) * (w.y() - u.y());
    return cd(0.0, 2.0 * kPi * cross);
}

double local_chern_marker(const StateIndexer& indexer, const FermiProjection& p,
                          const RegionMask& region) {
    const int n = indexer.dim();
    if (p.matrix.rows() != n)
        throw std::invalid_argument("local_chern_marker: dimension mismatch");
    if (region.site_count() == 0)
        throw std::invalid_argument("local_chern_marker: empty region");

    Eigen::VectorXd x1(n), x2(n);
    std::vector<int> region_states;
    for (int i = 0; i < n; ++i) {
        const auto st = indexer.unflat(i);
        x1[i] = st.n1;
        x2[i] = st.n2;
        if (region.contains(st.n1, st.n2)) region_states.push_back(i);
    }

    Eigen::MatrixXcd c1(n, n), c2(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            c1(i, j) = (x1[i] - x1[j]) * p.matrix(i, j);
            c2(i, j) = (x2[i] - x2[j]) * p.matrix(i, j);
        }
    }
    const Eigen::MatrixXcd k = c1 * c2 - c2 * c1;

    cd trace(0.0, 0.0);
    for (int i : region_states)
        trace += p.matrix.row(i).transpose().cwiseProduct(k.col(i)).sum();
    const cd marker = cd(0.0, -2.0 * kPi) * trace / static_cast<double>(region.site_count());
    if (std::abs(marker.imag()) > 1e-9 * std::max(1.0, std::abs(marker.real())))
        throw std::runtime_error("local_chern_marker: imaginary residue " +
                                 std::to_string(marker.imag()));
    return marker.real();
}

double kubo_hall(const StateIndexer& indexer, const EigenDecomposition& d, double e_f,
                 DualPoint a) {
    const auto& spec = indexer.spec();
    if (spec.boundary != Boundary::Open)
        throw std::invalid_argument("kubo_hall: open boundary required");
    if (interior_distance(spec, a) < std::min(spec.l1, spec.l2) / 4.0)
        throw std::invalid_argument("kubo_hall: cut anchor violates interior margin");
    const int n = indexer.dim();
    if (d.eigenvalues.size() != n)
        throw std::invalid_argument("kubo_hall: dimension mismatch");

    int rank = 0;
    for (int i = 0; i < n; ++i) {
        if (std::abs(d.eigenvalues[i] - e_f) < 1e-10)
            throw GapClosedError("kubo_hall: Fermi level on spectrum");
        if (d.eigenvalues[i] < e_f) ++rank;
    }

    // Step functions theta_j(n) = [n_j - a_j >= 0], and current matrix
    // elements <i|J_j|k> = i (E_i - E_k) <i|theta_j|k> from J_j = i[H, theta_j].
    Eigen::VectorXd th1(n), th2(n);
    for (int i = 0; i < n; ++i) {
        const auto st = indexer.unflat(i);
        th1[i] = st.n1 - a.a1 >= 0 ? 1.0 : 0.0;
        th2[i] = st.n2 - a.a2 >= 0 ? 1.0 : 0.0;
    }
    const Eigen::MatrixXcd t1 =
        d.eigenvectors.adjoint() * (th1.cast<cd>().asDiagonal() * d.eigenvectors);
    const Eigen::MatrixXcd t2 =
        d.eigenvectors.adjoint() * (th2.cast<cd>().asDiagonal() * d.eigenvectors);

    cd sum(0.0, 0.0);
    for (int i = 0; i < rank; ++i) {
        for (int j = rank; j < n; ++j) {
            const double de = d.eigenvalues[i] - d.eigenvalues[j];
            const cd j1_ij = cd(0.0, de) * t1(i, j);
            const cd j2_ji = cd(0.0, -de) * t2(j, i);
            const cd j2_ij = cd(0.0, de) * t2(i, j);
            const cd j1_ji = cd(0.0, -de) * t1(j, i);
            sum += (j1_ij * j2_ji - j2_ij * j1_ji) / (de * de);
        }
    }
    const cd hall = cd(0.0, 2.0 * kPi) * sum;
    if (std::abs(hall.imag()) > 1e-9 * std::max(1.0, std::abs(hall.real())))
        throw std::runtime_error("kubo_hall: imaginary residue " + std::to_string(hall.imag()));
    return hall.real();
}

}  // namespace fluxindex
