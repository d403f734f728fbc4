#ifndef FLUXINDEX_CONFIG_HPP
#define FLUXINDEX_CONFIG_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fluxindex/experiment.hpp"
#include "fluxindex/lattice.hpp"
#include "fluxindex/model.hpp"

#include "json.hpp"

namespace fluxindex {

inline constexpr const char* kVersion = "fluxindex 0.1.0";

struct NumericsPolicy {
    double fermi_energy = 0.0;
    double delta = 0.5;
    int grid_n = 24;
    int radius = 256;
    double window_lo = 0.01;
    double window_hi = 0.99;
    double pair_tol = 1e-6;
    double gap_threshold = 0.01;
    int marker_region = 0;  // side of the marker region; 0 picks l1/3
};

struct SweepSpec {
    SweepParameter parameter = SweepParameter::DisorderW;
    std::vector<double> values;
    int realizations = 1;
    std::uint64_t base_seed = 1;
    bool resume = false;
};

struct ConnesSpec {
    std::vector<std::array<Eigen::Vector2i, 3>> triples;
    int radius = 256;
};

/* Resolved run configuration: JSON file plus flag overrides, validated
   against a strict key schema (unknown keys rejected). */
struct RunConfig {
    std::string model_type = "haldane";  // "haldane" | "kane_mele"
    HaldaneParams haldane;
    Chirality chirality = Chirality::Plus;
    double lambda_r = 0.0;
    double disorder_w = 0.0;
    std::uint64_t seed = 1;

    LatticeSpec lattice{16, 16, Boundary::Open, 2, 2};
    NumericsPolicy numerics;
    std::optional<SweepSpec> sweep;
    std::optional<ConnesSpec> connes;
    std::string out_dir = "out";
    int threads = 1;

    static RunConfig from_json(const nlohmann::json& j);  // throws ConfigError
    static RunConfig from_file(const std::string& path);
    nlohmann::json to_json() const;

    // Lattice spec with the spin count the model needs (1 for the spinless
    // Haldane runs, 2 for Kane-Mele).
    LatticeSpec model_lattice() const;
    KaneMeleParams kane_mele_params() const;
    SweepConfig sweep_config() const;  // throws ConfigError when sweep absent

    // Provenance block embedded in every report.
    nlohmann::json provenance() const;
};

}  // namespace fluxindex

#endif
