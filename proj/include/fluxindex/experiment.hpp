#ifndef FLUXINDEX_EXPERIMENT_HPP
#define FLUXINDEX_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fluxindex/lattice.hpp"
#include "fluxindex/model.hpp"
#include "fluxindex/ncindex.hpp"

#include "json.hpp"

namespace fluxindex {

enum class SweepParameter { DisorderW, LambdaV };

struct SweepConfig {
    KaneMeleParams base;
    LatticeSpec lattice;
    SweepParameter parameter = SweepParameter::DisorderW;
    std::vector<double> values;      // monotone
    int realizations = 1;
    std::uint64_t base_seed = 0;
    double fermi_energy = 0.0;
    double delta = 0.5;
    double gap_threshold = 0.01;     // below this the index claim is suppressed
    int workers = 1;

    void validate() const;
};

struct SweepRecord {
    double value = 0.0;
    int realization = 0;
    std::uint64_t seed = 0;
    double gap = 0.0;
    std::optional<double> trace_a3;
    std::optional<int> chern;
    std::optional<int> z2;
    std::optional<double> residual;
    bool gap_closed = false;
    bool ambiguous_window = false;
    double wall_time_s = 0.0;

    bool flagged() const { return gap_closed || ambiguous_window; }
};

using RecordSink = std::function<void(const SweepRecord&)>;
// (value index, realization) pairs already present in a resumed output file.
using DoneSet = std::set<std::pair<int, int>>;

// Disorder robustness sweep: one record per (value, realization), with the
// flux at the central dual point. Realization seeds are base_seed + index,
// so record lists are reproducible and resumable. Records with gap below
// gap_threshold carry gap_closed and no index fields. Throws when a
// perturbed Hamiltonian loses odd time reversal.
std::vector<SweepRecord> disorder_sweep(const SweepConfig& cfg, const RecordSink& sink = {},
                                        const DoneSet* done = nullptr);

// Staggered-potential sweep across the topological transition; same record
// contract as disorder_sweep.
std::vector<SweepRecord> transition_sweep(const SweepConfig& cfg, const RecordSink& sink = {},
                                          const DoneSet* done = nullptr);

struct ContinuityRow {
    double scale = 0.0;
    double dh_norm = 0.0;            // ||s * dH||_2
    double projection_drift = 0.0;   // ||P' - P||_2
    double eigenvalue_drift = 0.0;   // max_i |lambda_i(A') - lambda_i(A)|
    bool gap_closed = false;
};

// Continuity of the Fermi projection and of the A-spectrum along the ray
// H + s * dH. Scales must ascend; once the gap closes the remaining rows
// are flagged and skipped.
std::vector<ContinuityRow> continuity_study(const Hamiltonian& h, const Hamiltonian& dh,
                                            std::span<const double> scales, double e_f);

// CSV persistence (one row per record; stable documented header).
std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRecord& r);
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

// Per-value aggregates: min gap, index consensus, flip locations.
nlohmann::json sweep_summary(const SweepConfig& cfg, const std::vector<SweepRecord>& records);

}  // namespace fluxindex

#endif
