// Command-line surface: every computation behind reproducible JSON configs
// with machine-readable CSV/JSON outputs.
//
// Exit codes: 0 success, 2 config error, 3 gap closed, 4 quality-gate failure.

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fluxindex/config.hpp"
#include "fluxindex/errors.hpp"
#include "fluxindex/experiment.hpp"
#include "fluxindex/kspace.hpp"
#include "fluxindex/ncindex.hpp"
#include "fluxindex/spectral.hpp"

extern "C" void openblas_set_num_threads(int);

namespace {

using fluxindex::Boundary;
using fluxindex::BZGrid;
using fluxindex::ConfigError;
using fluxindex::GapClosedError;
using fluxindex::RunConfig;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitGapClosed = 3;
constexpr int kExitQualityGate = 4;

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_report(const RunConfig& cfg, const std::string& name, json report) {
    report["provenance"] = cfg.provenance();
    std::filesystem::create_directories(cfg.out_dir);
    write_text(std::filesystem::path(cfg.out_dir) / name, report.dump(2) + "\n");
}

void write_eigenvalue_csv(const RunConfig& cfg, const std::string& name,
                          const Eigen::VectorXd& values) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(std::filesystem::path(cfg.out_dir) / name);
    out << "index,value\n";
    char buf[40];
    for (int i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", i, values[i]);
        out << buf;
    }
}

void require_open_boundary(const RunConfig& cfg) {
    if (cfg.lattice.boundary != Boundary::Open)
        throw ConfigError("this command needs lattice.boundary = 'open'");
}

fluxindex::Hamiltonian build_model(const RunConfig& cfg) {
    if (cfg.model_type == "kane_mele")
        return build_kane_mele(cfg.kane_mele_params(), cfg.model_lattice());
    fluxindex::Hamiltonian h =
        build_haldane(cfg.haldane, cfg.model_lattice(), cfg.chirality);
    if (cfg.disorder_w > 0.0) h = add_disorder(h, cfg.disorder_w, cfg.seed);
    return h;
}

int marker_side(const RunConfig& cfg) {
    if (cfg.numerics.marker_region > 0) return cfg.numerics.marker_region;
    return std::max(2, cfg.lattice.l1 / 3);
}

int cmd_chern(const RunConfig& cfg) {
    if (cfg.model_type != "haldane")
        throw ConfigError("chern: model.type must be 'haldane'");
    require_open_boundary(cfg);

    const auto spec = cfg.model_lattice();
    const auto h = build_model(cfg);
    const auto d = diagonalize(h);
    const auto gap = spectral_gap(d, cfg.numerics.fermi_energy);
    if (gap.gap < cfg.numerics.gap_threshold)
        throw GapClosedError("chern: spectral gap " + std::to_string(gap.gap) +
                             " below threshold");

    const auto p = fermi_projection(d, cfg.numerics.fermi_energy);
    const fluxindex::FluxUnitary flux(spec, central_dual_point(spec));
    const auto report = index_report(build_pair_ops(p, flux), cfg.numerics.delta);

    const auto bloch = fluxindex::BlochHamiltonian::haldane(cfg.haldane, cfg.chirality);
    const int lattice_chern = chern_lattice(bloch, BZGrid(cfg.numerics.grid_n));

    const fluxindex::StateIndexer indexer(spec);
    const auto region = fluxindex::RegionMask::centered_square(spec, marker_side(cfg));
    const double marker = local_chern_marker(indexer, p, region);
    const double kubo = kubo_hall(indexer, d, cfg.numerics.fermi_energy, flux.anchor());

    const bool estimators_agree = report.chern == lattice_chern &&
                                  std::abs(report.trace_a3 - marker) <= 0.2 &&
                                  std::abs(report.trace_a3 - kubo) <= 0.3;
    const bool quality = report.residual <= 0.25 && !report.ambiguous_window;

    json rep{{"gap", gap.gap},
             {"real_space", report.to_json()},
             {"chern_lattice", lattice_chern},
             {"local_chern_marker", marker},
             {"marker_region_side", marker_side(cfg)},
             {"kubo_hall", kubo},
             {"estimators_agree", estimators_agree},
             {"quality_gate_passed", quality},
             {"agreement_tolerances",
              {{"marker_vs_trace_a3", 0.2}, {"kubo_vs_trace_a3", 0.3}, {"residual", 0.25}}}};
    write_report(cfg, "chern_report.json", rep);
    write_eigenvalue_csv(cfg, "a_spectrum.csv", report.eigenvalues);

    std::printf("chern: real-space %d (Tr A^3 = %.6f, residual %.4f), lattice %d, "
                "marker %.4f, kubo %.4f\n",
                report.chern, report.trace_a3, report.residual, lattice_chern, marker, kubo);
    return estimators_agree && quality ? kExitOk : kExitQualityGate;
}

int cmd_z2(const RunConfig& cfg) {
    if (cfg.model_type != "kane_mele")
        throw ConfigError("z2: model.type must be 'kane_mele'");
    require_open_boundary(cfg);

    const auto spec = cfg.model_lattice();
    const auto h = build_model(cfg);
    const fluxindex::TimeReversalOp theta(spec);
    if (!check_odd_trs(h, theta))
        throw std::runtime_error("z2: built Hamiltonian is not odd time-reversal symmetric");

    const auto d = diagonalize(h);
    const auto gap = spectral_gap(d, cfg.numerics.fermi_energy);
    if (gap.gap < cfg.numerics.gap_threshold)
        throw GapClosedError("z2: spectral gap " + std::to_string(gap.gap) + " below threshold");

    const auto p = fermi_projection(d, cfg.numerics.fermi_energy);
    const fluxindex::FluxUnitary flux(spec, central_dual_point(spec));
    const auto ops = build_pair_ops(p, flux);
    const auto report = index_report(ops, cfg.numerics.delta);
    const std::pair<double, double> window{cfg.numerics.window_lo, cfg.numerics.window_hi};
    const bool susy = susy_pairing_check(ops, window, cfg.numerics.pair_tol);
    const bool kramers =
        trs_even_degeneracy_check(ops, theta, flux, window, cfg.numerics.pair_tol);

    const bool quality = report.residual <= 0.25 && !report.ambiguous_window && susy && kramers;
    json rep{{"gap", gap.gap},
             {"real_space", report.to_json()},
             {"susy_pairing", susy},
             {"trs_even_degeneracy", kramers},
             {"quality_gate_passed", quality}};
    write_report(cfg, "z2_report.json", rep);
    write_eigenvalue_csv(cfg, "a_spectrum.csv", report.eigenvalues);

    std::printf("z2: %d (Tr A^3 = %.6f, n+ = %d, n- = %d, gap %.4f)\n", report.z2,
                report.trace_a3, report.n_plus, report.n_minus, gap.gap);
    return quality ? kExitOk : kExitQualityGate;
}

int cmd_spectrum(const RunConfig& cfg) {
    const auto h = build_model(cfg);
    const auto d = diagonalize(h);
    const auto gap = spectral_gap(d, cfg.numerics.fermi_energy);
    json rep{{"dim", h.dim()},
             {"gap", gap.gap},
             {"highest_occupied", gap.highest_occupied},
             {"lowest_empty", gap.lowest_empty},
             {"fermi_energy", gap.fermi_energy}};
    write_report(cfg, "spectrum_report.json", rep);
    write_eigenvalue_csv(cfg, "spectrum.csv", d.eigenvalues);
    std::printf("spectrum: dim %d, gap %.6f at E_F = %g\n", h.dim(), gap.gap,
                cfg.numerics.fermi_energy);
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg) {
    auto sweep_cfg = cfg.sweep_config();
    std::filesystem::create_directories(cfg.out_dir);
    const auto csv_path = std::filesystem::path(cfg.out_dir) / "sweep.csv";

    std::vector<fluxindex::SweepRecord> previous;
    fluxindex::DoneSet done;
    const bool resuming = cfg.sweep->resume && std::filesystem::exists(csv_path);
    if (resuming) {
        std::ifstream in(csv_path);
        previous = fluxindex::read_sweep_csv(in);
        for (const auto& r : previous) {
            for (int vi = 0; vi < static_cast<int>(sweep_cfg.values.size()); ++vi)
                if (sweep_cfg.values[vi] == r.value) done.insert({vi, r.realization});
        }
    }

    std::ofstream csv(csv_path, resuming ? std::ios::app : std::ios::trunc);
    if (!resuming) csv << fluxindex::sweep_csv_header() << "\n";
    const fluxindex::RecordSink sink = [&](const fluxindex::SweepRecord& r) {
        csv << sweep_csv_row(r) << "\n";
        csv.flush();
    };

    if (sweep_cfg.workers > 1) openblas_set_num_threads(1);
    auto records = sweep_cfg.parameter == fluxindex::SweepParameter::DisorderW
                       ? disorder_sweep(sweep_cfg, sink, done.empty() ? nullptr : &done)
                       : transition_sweep(sweep_cfg, sink, done.empty() ? nullptr : &done);
    records.insert(records.end(), previous.begin(), previous.end());
    std::stable_sort(records.begin(), records.end(), [&](const auto& a, const auto& b) {
        return std::pair(a.value, a.realization) < std::pair(b.value, b.realization);
    });

    const json summary = sweep_summary(sweep_cfg, records);
    write_report(cfg, "sweep_summary.json", summary);
    for (const auto& entry : summary.at("per_value")) {
        std::printf("value %-8g min_gap %-8.4f z2 %s\n", entry.at("value").get<double>(),
                    entry.at("min_gap").get<double>(),
                    entry.at("z2").is_null() ? "-" : std::to_string(entry.at("z2").get<int>()).c_str());
    }
    return kExitOk;
}

int cmd_connes(const RunConfig& cfg) {
    fluxindex::ConnesSpec spec;
    if (cfg.connes) spec = *cfg.connes;
    if (spec.triples.empty()) {
        using V = Eigen::Vector2i;
        spec.triples = {{V(0, 0), V(1, 0), V(0, 1)},
                        {V(0, 0), V(1, 0), V(1, 1)},
                        {V(0, 0), V(1, 1), V(0, 1)},
                        {V(0, 0), V(2, 0), V(1, 1)},
                        {V(1, 0), V(0, 1), V(1, 1)}};
    }
    bool all_ok = true;
    json rows = json::array();
    for (const auto& t : spec.triples) {
        const auto sum = fluxindex::connes_area_sum(t[0], t[1], t[2], spec.radius);
        const auto target = fluxindex::connes_area_target(t[0], t[1], t[2]);
        const double denom = std::abs(target);
        const double rel = denom > 0 ? std::abs(sum - target) / denom : std::abs(sum);
        all_ok = all_ok && rel <= 0.05;
        json row{{"u", {t[0].x(), t[0].y()}},
                 {"v", {t[1].x(), t[1].y()}},
                 {"w", {t[2].x(), t[2].y()}},
                 {"sum_re", sum.real()},
                 {"sum_im", sum.imag()},
                 {"target_im", target.imag()},
                 {"relative_error", rel}};
        rows.push_back(row);
        std::printf("triple (%d,%d)(%d,%d)(%d,%d): sum %.4f%+.4fi target %+.4fi rel %.4f\n",
                    t[0].x(), t[0].y(), t[1].x(), t[1].y(), t[2].x(), t[2].y(), sum.real(),
                    sum.imag(), target.imag(), rel);
    }
    write_report(cfg, "connes_report.json",
                 json{{"radius", spec.radius}, {"triples", rows}, {"all_within_5pct", all_ok}});
    return all_ok ? kExitOk : kExitQualityGate;
}

int cmd_kspace(const RunConfig& cfg) {
    if (cfg.model_type != "haldane")
        throw ConfigError("kspace: model.type must be 'haldane'");
    const auto bloch = fluxindex::BlochHamiltonian::haldane(cfg.haldane, cfg.chirality);
    const BZGrid grid(cfg.numerics.grid_n);
    const int chern = chern_lattice(bloch, grid);
    const auto dirac = dirac_report(bloch);
    const fluxindex::GaugePatchPair patches(bloch);
    const auto kupklow = gauge_patch_kupklow(patches, grid);
    const bool gauge_ok = gauge_patch_check(patches, grid);

    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream out(std::filesystem::path(cfg.out_dir) / "berry_curvature.csv");
        out << "k1,k2,curvature\n";
        char buf[96];
        for (const auto& p : berry_curvature(bloch, grid)) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.k1, p.k2, p.curvature);
            out << buf;
        }
    }
    json dirac_json = json::array();
    for (const auto& dp : dirac)
        dirac_json.push_back(
            {{"k", {dp.momentum.x(), dp.momentum.y()}}, {"mass", dp.mass}});
    write_report(cfg, "kspace_report.json",
                 json{{"chern_lattice", chern},
                      {"dirac_points", dirac_json},
                      {"kup_plus_klow_im", kupklow.imag()},
                      {"gauge_patch_check", gauge_ok}});
    std::printf("kspace: chern %d, K^up+K^low = %.6fi, gauge check %s\n", chern, kupklow.imag(),
                gauge_ok ? "ok" : "FAILED");
    return gauge_ok ? kExitOk : kExitQualityGate;
}

int cmd_ebz_z2(const RunConfig& cfg) {
    if (cfg.model_type != "kane_mele")
        throw ConfigError("ebz-z2: model.type must be 'kane_mele'");
    if (cfg.disorder_w != 0.0)
        throw ConfigError("ebz-z2: momentum-space invariant needs disorder_w = 0");
    const auto bloch = fluxindex::BlochHamiltonian::kane_mele(cfg.haldane, cfg.lambda_r);
    const int z2 = z2_ebz(bloch, BZGrid(cfg.numerics.grid_n));
    write_report(cfg, "ebz_z2_report.json", json{{"z2_ebz", z2}});
    std::printf("ebz-z2: %d\n", z2);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noncommutative Chern and Z2 indices of 2D tight-binding insulators"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> size;
    std::optional<double> delta;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "override model seed (and sweep base seed)");
    app.add_option("--size", size, "override lattice size (L1 = L2 = L)");
    app.add_option("--delta", delta, "override the kernel-counting window delta");
    app.add_option("--out", out_dir, "override output directory");
    app.add_option("--threads", threads, "worker / BLAS thread cap");

    auto* chern = app.add_subcommand("chern", "all four Chern estimators, cross-tabulated");
    auto* z2 = app.add_subcommand("z2", "real-space Z2 index with pairing checks");
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and gap report");
    auto* sweep = app.add_subcommand("sweep", "disorder or staggered-potential sweep");
    auto* connes = app.add_subcommand("connes-check", "truncated Connes area sums");
    auto* kspace = app.add_subcommand("kspace", "momentum-space invariants and curvature table");
    auto* ebz = app.add_subcommand("ebz-z2", "Z2 from the effective-Brillouin-zone integral");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg =
            config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
        if (seed) {
            cfg.seed = *seed;
            if (cfg.sweep) cfg.sweep->base_seed = *seed;
        }
        if (size) {
            cfg.lattice.l1 = *size;
            cfg.lattice.l2 = *size;
        }
        if (delta) cfg.numerics.delta = *delta;
        if (out_dir) cfg.out_dir = *out_dir;
        if (threads) cfg.threads = *threads;
        openblas_set_num_threads(cfg.threads);

        if (chern->parsed()) return cmd_chern(cfg);
        if (z2->parsed()) return cmd_z2(cfg);
        if (spectrum->parsed()) return cmd_spectrum(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (connes->parsed()) return cmd_connes(cfg);
        if (kspace->parsed()) return cmd_kspace(cfg);
        if (ebz->parsed()) return cmd_ebz_z2(cfg);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const GapClosedError& e) {
        std::cerr << "gap closed: " << e.what() << "\n";
        return kExitGapClosed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
