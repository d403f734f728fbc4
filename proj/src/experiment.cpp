#include "fluxindex/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fluxindex/errors.hpp"
#include "fluxindex/spectral.hpp"

namespace fluxindex {

namespace {

std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

SweepRecord run_point(const SweepConfig& cfg, double value, int realization) {
    const auto t0 = std::chrono::steady_clock::now();
    KaneMeleParams params = cfg.base;
    params.seed = cfg.base_seed + static_cast<std::uint64_t>(realization);
    if (cfg.parameter == SweepParameter::DisorderW)
        params.disorder_w = value;
    else
        params.haldane.lambda_v = value;

    const Hamiltonian h = build_kane_mele(params, cfg.lattice);
    const TimeReversalOp theta(cfg.lattice);
    if (!check_odd_trs(h, theta))
        throw std::runtime_error("sweep: perturbed Hamiltonian lost odd time reversal");

    SweepRecord rec;
    rec.value = value;
    rec.realization = realization;
    rec.seed = params.seed;

    const EigenDecomposition d = diagonalize(h);
    rec.gap = spectral_gap(d, cfg.fermi_energy).gap;
    if (rec.gap < cfg.gap_threshold) {
        rec.gap_closed = true;
    } else {
        const FermiProjection p = fermi_projection(d, cfg.fermi_energy);
        const FluxUnitary u(cfg.lattice, central_dual_point(cfg.lattice));
        const IndexReport report = index_report(build_pair_ops(p, u), cfg.delta);
        rec.trace_a3 = report.trace_a3;
        rec.chern = report.chern;
        rec.z2 = report.z2;
        rec.residual = report.residual;
        rec.ambiguous_window = report.ambiguous_window;
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg, const RecordSink& sink,
                                   const DoneSet* done) {
    cfg.validate();
    struct Task {
        int value_idx;
        int realization;
    };
    std::vector<Task> tasks;
    for (int vi = 0; vi < static_cast<int>(cfg.values.size()); ++vi)
        for (int r = 0; r < cfg.realizations; ++r)
            if (!done || !done->count({vi, r})) tasks.push_back({vi, r});

    std::vector<SweepRecord> records(tasks.size());
    std::mutex sink_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            records[i] = run_point(cfg, cfg.values[tasks[i].value_idx], tasks[i].realization);
            if (sink) {
                std::lock_guard lock(sink_mutex);
                sink(records[i]);
            }
        }
    };
    const int workers = std::max(1, cfg.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return records;  // already in (value, realization) order by construction
}

}  // namespace

void SweepConfig::validate() const {
    lattice.validate();
    if (values.empty()) throw std::invalid_argument("sweep: empty value list");
    const bool increasing = values.size() < 2 || values[1] >= values[0];
    for (std::size_t i = 1; i < values.size(); ++i)
        if ((values[i] >= values[i - 1]) != increasing)
            throw std::invalid_argument("sweep: value list must be monotone");
    if (realizations < 1) throw std::invalid_argument("sweep: realizations must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("sweep: delta must be in (0,1)");
    if (gap_threshold <= 0.0) throw std::invalid_argument("sweep: gap_threshold must be > 0");
}

std::vector<SweepRecord> disorder_sweep(const SweepConfig& cfg, const RecordSink& sink,
                                        const DoneSet* done) {
    SweepConfig c = cfg;
    c.parameter = SweepParameter::DisorderW;
    for (double v : c.values)
        if (v < 0.0) throw std::invalid_argument("disorder_sweep: W must be >= 0");
    return run_sweep(c, sink, done);
}

std::vector<SweepRecord> transition_sweep(const SweepConfig& cfg, const RecordSink& sink,
                                          const DoneSet* done) {
    SweepConfig c = cfg;
    c.parameter = SweepParameter::LambdaV;
    return run_sweep(c, sink, done);
}

std::vector<ContinuityRow> continuity_study(const Hamiltonian& h, const Hamiltonian& dh,
                                            std::span<const double> scales, double e_f) {
    if (h.dim() != dh.dim()) throw std::invalid_argument("continuity_study: dimension mismatch");
    for (std::size_t i = 1; i < scales.size(); ++i)
        if (scales[i] < scales[i - 1])
            throw std::invalid_argument("continuity_study: scales must ascend");

    const FluxUnitary u(h.spec, central_dual_point(h.spec));
    const EigenDecomposition d0 = diagonalize(h);
    if (spectral_gap(d0, e_f).gap <= 1e-10)
        throw GapClosedError("continuity_study: unperturbed gap closed");
    const FermiProjection p0 = fermi_projection(d0, e_f);
    const Eigen::VectorXd a0 = hermitian_eigenvalues(build_pair_ops(p0, u).a_op);
    const double dh_norm = hermitian_spectral_norm(dh.matrix);

    std::vector<ContinuityRow> rows;
    bool closed = false;
    for (double s : scales) {
        ContinuityRow row;
        row.scale = s;
        row.dh_norm = std::abs(s) * dh_norm;
        if (closed) {
            row.gap_closed = true;
            rows.push_back(row);
            continue;
        }
        const Hamiltonian hs{h.spec, h.matrix + s * dh.matrix};
        const EigenDecomposition ds = diagonalize(hs);
        if (spectral_gap(ds, e_f).gap <= 1e-10) {
            row.gap_closed = true;
            closed = true;
            rows.push_back(row);
            continue;
        }
        const FermiProjection ps = fermi_projection(ds, e_f);
        row.projection_drift = hermitian_spectral_norm(ps.matrix - p0.matrix);
        const Eigen::VectorXd as = hermitian_eigenvalues(build_pair_ops(ps, u).a_op);
        row.eigenvalue_drift = (as - a0).cwiseAbs().maxCoeff();
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv_header() {
    return "value,realization,seed,gap,trace_a3,chern,z2,residual,gap_closed,ambiguous_window,"
           "wall_time_s";
}

std::string sweep_csv_row(const SweepRecord& r) {
    std::ostringstream os;
    os << fmt_double(r.value) << ',' << r.realization << ',' << r.seed << ',' << fmt_double(r.gap)
       << ',';
    if (r.trace_a3) os << fmt_double(*r.trace_a3);
    os << ',';
    if (r.chern) os << *r.chern;
    os << ',';
    if (r.z2) os << *r.z2;
    os << ',';
    if (r.residual) os << fmt_double(*r.residual);
    os << ',' << (r.gap_closed ? 1 : 0) << ',' << (r.ambiguous_window ? 1 : 0) << ','
       << fmt_double(r.wall_time_s);
    return os.str();
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
    std::vector<SweepRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (first && line.rfind("value,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        while (cells.size() < 11) cells.emplace_back();
        SweepRecord r;
        r.value = std::stod(cells[0]);
        r.realization = std::stoi(cells[1]);
        r.seed = std::stoull(cells[2]);
        r.gap = std::stod(cells[3]);
        if (!cells[4].empty()) r.trace_a3 = std::stod(cells[4]);
        if (!cells[5].empty()) r.chern = std::stoi(cells[5]);
        if (!cells[6].empty()) r.z2 = std::stoi(cells[6]);
        if (!cells[7].empty()) r.residual = std::stod(cells[7]);
        r.gap_closed = cells[8] == "1";
        r.ambiguous_window = cells[9] == "1";
        if (!cells[10].empty()) r.wall_time_s = std::stod(cells[10]);
        records.push_back(r);
    }
    return records;
}

nlohmann::json sweep_summary(const SweepConfig& cfg, const std::vector<SweepRecord>& records) {
    nlohmann::json per_value = nlohmann::json::array();
    std::vector<std::pair<double, std::optional<int>>> consensus;
    for (double v : cfg.values) {
        double min_gap = std::numeric_limits<double>::infinity();
        int n_records = 0, n_flagged = 0;
        std::optional<int> z2_consensus, chern_consensus;
        bool z2_consistent = true, chern_consistent = true;
        for (const SweepRecord& r : records) {
            if (r.value != v) continue;
            ++n_records;
            min_gap = std::min(min_gap, r.gap);
            if (r.flagged()) {
                ++n_flagged;
                continue;
            }
            if (r.z2) {
                if (!z2_consensus)
                    z2_consensus = *r.z2;
                else if (*z2_consensus != *r.z2)
                    z2_consistent = false;
            }
            if (r.chern) {
                if (!chern_consensus)
                    chern_consensus = *r.chern;
                else if (*chern_consensus != *r.chern)
                    chern_consistent = false;
            }
        }
        nlohmann::json entry{{"value", v},
                             {"records", n_records},
                             {"flagged", n_flagged},
                             {"min_gap", n_records ? min_gap : 0.0}};
        if (z2_consensus && z2_consistent)
            entry["z2"] = *z2_consensus;
        else
            entry["z2"] = nullptr;
        if (chern_consensus && chern_consistent)
            entry["chern"] = *chern_consensus;
        else
            entry["chern"] = nullptr;
        per_value.push_back(entry);
        consensus.emplace_back(v, z2_consistent ? z2_consensus : std::nullopt);
    }

    nlohmann::json flips = nlohmann::json::array();
    std::optional<std::pair<double, int>> last;
    for (const auto& [v, z2] : consensus) {
        if (!z2) continue;
        if (last && last->second != *z2) flips.push_back({last->first, v});
        last = {v, *z2};
    }

    return nlohmann::json{
        {"parameter", cfg.parameter == SweepParameter::DisorderW ? "disorder_w" : "lambda_v"},
        {"realizations", cfg.realizations},
        {"base_seed", cfg.base_seed},
        {"gap_threshold", cfg.gap_threshold},
        {"per_value", per_value},
        {"z2_flip_intervals", flips}};
}

}  // namespace fluxindex
