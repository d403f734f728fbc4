#include "fluxindex/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "fluxindex/errors.hpp"

namespace fluxindex {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + key + "'");
    }
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: parse error in '" + path + "': " + e.what());
    }
    return from_json(j);
}

RunConfig RunConfig::from_json(const json& j) {
    require_keys(j, "config",
                 {"model", "lattice", "numerics", "sweep", "connes", "output", "threads"});
    RunConfig cfg;

    if (j.contains("model")) {
        const json& m = j.at("model");
        require_keys(m, "model",
                     {"type", "t", "t_prime", "lambda_v", "chirality", "lambda_r", "disorder_w",
                      "seed"});
        cfg.model_type = get_or<std::string>(m, "type", "haldane");
        if (cfg.model_type != "haldane" && cfg.model_type != "kane_mele")
            throw ConfigError("model.type must be 'haldane' or 'kane_mele'");
        cfg.haldane.t = get_or(m, "t", 1.0);
        cfg.haldane.t_prime = get_or(m, "t_prime", 0.1);
        cfg.haldane.lambda_v = get_or(m, "lambda_v", 0.0);
        const std::string chir = get_or<std::string>(m, "chirality", "plus");
        if (chir != "plus" && chir != "minus")
            throw ConfigError("model.chirality must be 'plus' or 'minus'");
        cfg.chirality = chir == "plus" ? Chirality::Plus : Chirality::Minus;
        cfg.lambda_r = get_or(m, "lambda_r", 0.0);
        cfg.disorder_w = get_or(m, "disorder_w", 0.0);
        if (cfg.disorder_w < 0.0) throw ConfigError("model.disorder_w must be >= 0");
        cfg.seed = get_or<std::uint64_t>(m, "seed", 1);
    }

    if (j.contains("lattice")) {
        const json& l = j.at("lattice");
        require_keys(l, "lattice", {"l1", "l2", "boundary"});
        cfg.lattice.l1 = get_or(l, "l1", 16);
        cfg.lattice.l2 = get_or(l, "l2", 16);
        const std::string b = get_or<std::string>(l, "boundary", "open");
        if (b != "open" && b != "periodic")
            throw ConfigError("lattice.boundary must be 'open' or 'periodic'");
        cfg.lattice.boundary = b == "open" ? Boundary::Open : Boundary::Periodic;
        if (cfg.lattice.l1 < 2 || cfg.lattice.l2 < 2)
            throw ConfigError("lattice: box must be at least 2x2");
    }

    if (j.contains("numerics")) {
        const json& n = j.at("numerics");
        require_keys(n, "numerics",
                     {"fermi_energy", "delta", "grid_n", "radius", "window_lo", "window_hi",
                      "pair_tol", "gap_threshold", "marker_region"});
        cfg.numerics.fermi_energy = get_or(n, "fermi_energy", 0.0);
        cfg.numerics.delta = get_or(n, "delta", 0.5);
        cfg.numerics.grid_n = get_or(n, "grid_n", 24);
        cfg.numerics.radius = get_or(n, "radius", 256);
        cfg.numerics.window_lo = get_or(n, "window_lo", 0.01);
        cfg.numerics.window_hi = get_or(n, "window_hi", 0.99);
        cfg.numerics.pair_tol = get_or(n, "pair_tol", 1e-6);
        cfg.numerics.gap_threshold = get_or(n, "gap_threshold", 0.01);
        cfg.numerics.marker_region = get_or(n, "marker_region", 0);
        if (!(cfg.numerics.delta > 0.0 && cfg.numerics.delta < 1.0))
            throw ConfigError("numerics.delta must lie in (0, 1)");
        if (cfg.numerics.grid_n < 6) throw ConfigError("numerics.grid_n must be >= 6");
    }

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        require_keys(s, "sweep", {"parameter", "values", "realizations", "base_seed", "resume"});
        SweepSpec spec;
        const std::string p = get_or<std::string>(s, "parameter", "disorder_w");
        if (p == "disorder_w")
            spec.parameter = SweepParameter::DisorderW;
        else if (p == "lambda_v")
            spec.parameter = SweepParameter::LambdaV;
        else
            throw ConfigError("sweep.parameter must be 'disorder_w' or 'lambda_v'");
        spec.values = get_or(s, "values", std::vector<double>{});
        if (spec.values.empty()) throw ConfigError("sweep.values must be a nonempty array");
        spec.realizations = get_or(s, "realizations", 1);
        if (spec.realizations < 1) throw ConfigError("sweep.realizations must be >= 1");
        spec.base_seed = get_or<std::uint64_t>(s, "base_seed", 1);
        spec.resume = get_or(s, "resume", false);
        cfg.sweep = spec;
    }

    if (j.contains("connes")) {
        const json& c = j.at("connes");
        require_keys(c, "connes", {"triples", "radius"});
        ConnesSpec spec;
        spec.radius = get_or(c, "radius", 256);
        if (c.contains("triples")) {
            for (const auto& t : c.at("triples")) {
                if (!t.is_array() || t.size() != 3)
                    throw ConfigError("connes.triples entries must be three [x, y] sites");
                std::array<Eigen::Vector2i, 3> triple;
                for (int i = 0; i < 3; ++i) {
                    const auto& site = t.at(i);
                    if (!site.is_array() || site.size() != 2)
                        throw ConfigError("connes.triples sites must be [x, y]");
                    triple[i] = Eigen::Vector2i(site.at(0).get<int>(), site.at(1).get<int>());
                }
                spec.triples.push_back(triple);
            }
        }
        cfg.connes = spec;
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        require_keys(o, "output", {"dir"});
        cfg.out_dir = get_or<std::string>(o, "dir", "out");
    }
    cfg.threads = get_or(j, "threads", 1);
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    return cfg;
}

json RunConfig::to_json() const {
    json m{{"type", model_type},
           {"t", haldane.t},
           {"t_prime", haldane.t_prime},
           {"lambda_v", haldane.lambda_v},
           {"chirality", chirality == Chirality::Plus ? "plus" : "minus"},
           {"lambda_r", lambda_r},
           {"disorder_w", disorder_w},
           {"seed", seed}};
    json l{{"l1", lattice.l1},
           {"l2", lattice.l2},
           {"boundary", lattice.boundary == Boundary::Open ? "open" : "periodic"}};
    json n{{"fermi_energy", numerics.fermi_energy},
           {"delta", numerics.delta},
           {"grid_n", numerics.grid_n},
           {"radius", numerics.radius},
           {"window_lo", numerics.window_lo},
           {"window_hi", numerics.window_hi},
           {"pair_tol", numerics.pair_tol},
           {"gap_threshold", numerics.gap_threshold},
           {"marker_region", numerics.marker_region}};
    json out{{"model", m},
             {"lattice", l},
             {"numerics", n},
             {"output", {{"dir", out_dir}}},
             {"threads", threads}};
    if (sweep) {
        out["sweep"] = {
            {"parameter", sweep->parameter == SweepParameter::DisorderW ? "disorder_w" : "lambda_v"},
            {"values", sweep->values},
            {"realizations", sweep->realizations},
            {"base_seed", sweep->base_seed},
            {"resume", sweep->resume}};
    }
    if (connes) {
        json triples = json::array();
        for (const auto& t : connes->triples)
            triples.push_back({{t[0].x(), t[0].y()}, {t[1].x(), t[1].y()}, {t[2].x(), t[2].y()}});
        out["connes"] = {{"triples", triples}, {"radius", connes->radius}};
    }
    return out;
}

LatticeSpec RunConfig::model_lattice() const {
    LatticeSpec spec = lattice;
    spec.orbitals = 2;
    spec.spins = model_type == "kane_mele" ? 2 : 1;
    return spec;
}

KaneMeleParams RunConfig::kane_mele_params() const {
    return KaneMeleParams{haldane, lambda_r, disorder_w, seed};
}

SweepConfig RunConfig::sweep_config() const {
    if (!sweep) throw ConfigError("config: this command needs a 'sweep' section");
    if (model_type != "kane_mele") throw ConfigError("sweep: model.type must be 'kane_mele'");
    SweepConfig sc;
    sc.base = kane_mele_params();
    sc.lattice = model_lattice();
    sc.parameter = sweep->parameter;
    sc.values = sweep->values;
    sc.realizations = sweep->realizations;
    sc.base_seed = sweep->base_seed;
    sc.fermi_energy = numerics.fermi_energy;
    sc.delta = numerics.delta;
    sc.gap_threshold = numerics.gap_threshold;
    sc.workers = threads;
    return sc;
}

json RunConfig::provenance() const {
    return json{{"version", kVersion}, {"seed", seed}, {"config", to_json()}};
}

}  // namespace fluxindex
