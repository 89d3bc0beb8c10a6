#include "crackle/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "crackle/contractibility.hpp"
#include "crackle/limits.hpp"
#include "crackle/report_io.hpp"
#include "crackle/stats.hpp"

namespace crackle {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (trim(v.substr(used)).empty()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + ": expected a number, got '" + v + "'");
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long long x = std::stoll(v, &used);
        if (trim(v.substr(used)).empty()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_double(xs[i]);
    return s;
}

std::string family_key(Family f) {
    switch (f) {
        case Family::HeavyPolynomial: return "heavy";
        case Family::LightVonMises: return "light";
        case Family::PluggablePsi: return "pluggable";
    }
    return "heavy";
}

std::string constraint_key(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::Connected: return "connected";
        case ConstraintKind::BettiCycle: return "betti_cycle";
        case ConstraintKind::GammaIso: return "gamma_iso";
    }
    return "connected";
}

SmallGraph named_graph(const std::string& name, int k) {
    if (name == "path") return SmallGraph::path(k);
    if (name == "cycle") {
        if (k < 3) throw ParameterError("a cycle needs k >= 3");
        return SmallGraph::cycle(k);
    }
    if (name == "star") return SmallGraph::star(k - 1);
    if (name == "complete") return SmallGraph::complete(k);
    throw ConfigError("constraint.graph: unknown graph '" + name + "' (path, cycle, star, complete)");
}

// Rebuilds the constraint from kind, k and graph name.
void refresh_constraint(CliConfig& c, ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::Connected: c.exp.constraint = Constraint::connected(c.exp.k); break;
        case ConstraintKind::BettiCycle: c.exp.constraint = Constraint::betti_cycle(c.exp.k); break;
        case ConstraintKind::GammaIso:
            c.exp.constraint = Constraint::gamma_iso(named_graph(c.constraint_graph, c.exp.k));
            break;
    }
}

using Setter = std::function<void(CliConfig&, const std::string&)>;
using Getter = std::function<std::string(const CliConfig&)>;

struct KeySpec {
    std::string key;
    Setter set;
    Getter get;
};

const std::vector<KeySpec>& key_specs() {
    static const std::vector<KeySpec> specs = {
        {"density.family",
         [](CliConfig& c, const std::string& v) {
             if (v == "heavy" || v == "HeavyPolynomial") c.exp.family = Family::HeavyPolynomial;
             else if (v == "light" || v == "LightVonMises") c.exp.family = Family::LightVonMises;
             else throw ConfigError("density.family: expected heavy or light, got '" + v + "'");
         },
         [](const CliConfig& c) { return family_key(c.exp.family); }},
        {"density.alpha", [](CliConfig& c, const std::string& v) { c.exp.alpha = parse_real("density.alpha", v); },
         [](const CliConfig& c) { return format_double(c.exp.alpha); }},
        {"density.tau", [](CliConfig& c, const std::string& v) { c.exp.tau = parse_real("density.tau", v); },
         [](const CliConfig& c) { return format_double(c.exp.tau); }},
        {"dim", [](CliConfig& c, const std::string& v) { c.exp.d = static_cast<int>(parse_int("dim", v)); },
         [](const CliConfig& c) { return std::to_string(c.exp.d); }},
        {"k", [](CliConfig& c, const std::string& v) { c.exp.k = static_cast<int>(parse_int("k", v)); },
         [](const CliConfig& c) { return std::to_string(c.exp.k); }},
        {"constraint.kind",
         [](CliConfig& c, const std::string& v) {
             if (v == "connected") c.exp.constraint.kind = ConstraintKind::Connected;
             else if (v == "betti_cycle") c.exp.constraint.kind = ConstraintKind::BettiCycle;
             else if (v == "gamma_iso") c.exp.constraint.kind = ConstraintKind::GammaIso;
             else throw ConfigError("constraint.kind: expected connected, betti_cycle or gamma_iso, got '" + v + "'");
         },
         [](const CliConfig& c) { return constraint_key(c.exp.constraint.kind); }},
        {"constraint.graph", [](CliConfig& c, const std::string& v) { c.constraint_graph = v; },
         [](const CliConfig& c) { return c.constraint_graph; }},
        {"r_n.rule", [](CliConfig& c, const std::string& v) { c.exp.rn = RnRule::parse(v); },
         [](const CliConfig& c) { return c.exp.rn.to_string(); }},
        {"n.grid", [](CliConfig& c, const std::string& v) { c.exp.n_grid = parse_list("n.grid", v); },
         [](const CliConfig& c) { return join(c.exp.n_grid); }},
        {"replications",
         [](CliConfig& c, const std::string& v) { c.exp.replications = static_cast<int>(parse_int("replications", v)); },
         [](const CliConfig& c) { return std::to_string(c.exp.replications); }},
        {"seed",
         [](CliConfig& c, const std::string& v) {
             long long s = parse_int("seed", v);
             if (s < 0) throw ConfigError("seed: must be non-negative");
             c.exp.master_seed = static_cast<std::uint64_t>(s);
         },
         [](const CliConfig& c) { return std::to_string(c.exp.master_seed); }},
        {"statistic", [](CliConfig& c, const std::string& v) { c.exp.statistic = parse_statistic(v); },
         [](const CliConfig& c) { return std::string(statistic_name(c.exp.statistic)); }},
        {"sampler",
         [](CliConfig& c, const std::string& v) {
             if (v == "restricted") c.exp.restricted_sampler = true;
             else if (v == "full") c.exp.restricted_sampler = false;
             else throw ConfigError("sampler: expected restricted or full, got '" + v + "'");
         },
         [](const CliConfig& c) { return std::string(c.exp.restricted_sampler ? "restricted" : "full"); }},
        {"mc.samples",
         [](CliConfig& c, const std::string& v) {
             long long s = parse_int("mc.samples", v);
             if (s < 1) throw ConfigError("mc.samples: must be positive");
             c.exp.lambda_mc_samples = static_cast<std::size_t>(s);
         },
         [](const CliConfig& c) { return std::to_string(c.exp.lambda_mc_samples); }},
        {"t.grid", [](CliConfig& c, const std::string& v) { c.t_grid = parse_list("t.grid", v); },
         [](const CliConfig& c) { return join(c.t_grid); }},
        {"annuli.k_max",
         [](CliConfig& c, const std::string& v) { c.annuli_k_max = static_cast<int>(parse_int("annuli.k_max", v)); },
         [](const CliConfig& c) { return std::to_string(c.annuli_k_max); }},
        {"contractibility.delta",
         [](CliConfig& c, const std::string& v) { c.delta = parse_real("contractibility.delta", v); },
         [](const CliConfig& c) { return format_double(c.delta); }},
        {"contractibility.g", [](CliConfig& c, const std::string& v) { c.g = parse_real("contractibility.g", v); },
         [](const CliConfig& c) { return format_double(c.g); }},
        {"contractibility.trials",
         [](CliConfig& c, const std::string& v) { c.trials = static_cast<int>(parse_int("contractibility.trials", v)); },
         [](const CliConfig& c) { return std::to_string(c.trials); }},
        {"palm.direct",
         [](CliConfig& c, const std::string& v) { c.palm_direct = static_cast<int>(parse_int("palm.direct", v)); },
         [](const CliConfig& c) { return std::to_string(c.palm_direct); }},
        {"palm.samples",
         [](CliConfig& c, const std::string& v) {
             long long s = parse_int("palm.samples", v);
             if (s < 1) throw ConfigError("palm.samples: must be positive");
             c.palm_samples = static_cast<std::size_t>(s);
         },
         [](const CliConfig& c) { return std::to_string(c.palm_samples); }},
        {"stable.terms",
         [](CliConfig& c, const std::string& v) {
             long long s = parse_int("stable.terms", v);
             if (s < 1) throw ConfigError("stable.terms: must be positive");
             c.stable_terms = static_cast<std::size_t>(s);
         },
         [](const CliConfig& c) { return std::to_string(c.stable_terms); }},
        {"scaling.C",
         [](CliConfig& c, const std::string& v) {
             if (v == "auto") {
                 c.scaling_C = 0.0;
                 return;
             }
             double x = parse_real("scaling.C", v);
             if (!(x > 0.0)) throw ConfigError("scaling.C: must be positive or auto");
             c.scaling_C = x;
         },
         [](const CliConfig& c) { return c.scaling_C > 0.0 ? format_double(c.scaling_C) : std::string("auto"); }},
        {"output.dir", [](CliConfig& c, const std::string& v) { c.output_dir = v; },
         [](const CliConfig& c) { return c.output_dir; }},
    };
    return specs;
}

const KeySpec* find_key(const std::string& key) {
    for (const auto& s : key_specs())
        if (s.key == key) return &s;
    return nullptr;
}

void finalize(CliConfig& c) { refresh_constraint(c, c.exp.constraint.kind); }

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& s : key_specs()) k.push_back(s.key);
        return k;
    }();
    return keys;
}

void apply_setting(CliConfig& cfg, const std::string& key, const std::string& value) {
    const KeySpec* s = find_key(key);
    if (!s) throw ConfigError("unknown key '" + key + "'");
    s->set(cfg, value);
    finalize(cfg);
}

CliConfig parse_config_text(const std::string& text, const std::string& source) {
    CliConfig cfg;
    std::set<std::string> seen;
    std::stringstream ss(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(ss, raw)) {
        ++lineno;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        auto where = source + ":" + std::to_string(lineno) + ": ";
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const KeySpec* s = find_key(key);
        if (!s) throw ConfigError(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + "key '" + key + "' given twice");
        if (value.empty()) throw ConfigError(where + "key '" + key + "' has no value");
        try {
            s->set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    finalize(cfg);
    return cfg;
}

CliConfig load_config(const std::filesystem::path& path) {
    return parse_config_text(read_text_file(path), path.string());
}

std::string serialize_config(const CliConfig& cfg) {
    std::string out;
    for (const auto& s : key_specs()) out += s.key + " = " + s.get(cfg) + "\n";
    return out;
}

void validate_config(const CliConfig& cfg) {
    if (cfg.exp.family == Family::HeavyPolynomial && !(cfg.exp.alpha > cfg.exp.d)) {
        std::ostringstream os;
        os << "density.alpha = " << cfg.exp.alpha << " violates alpha > d (d = " << cfg.exp.d
           << "); the heavy-tailed density is not integrable";
        throw DomainError(os.str());
    }
    if (cfg.exp.family == Family::LightVonMises && !(cfg.exp.tau > 0.0))
        throw DomainError("density.tau must be positive");
    if (cfg.exp.rn.kind == RnRule::Kind::Power) {
        try {
            check_power_band(cfg.exp.rn, cfg.exp.k, cfg.exp.d);
        } catch (const DomainError& e) {
            throw DomainError(std::string("r_n.rule: ") + e.what() + "; the scaling equation has no solution");
        }
    }
    cfg.exp.validate();
    if (cfg.annuli_k_max < 2 || cfg.annuli_k_max > 8) throw ParameterError("annuli.k_max must be in 2..8");
    if (cfg.trials < 1) throw ParameterError("contractibility.trials must be >= 1");
    if (cfg.palm_direct < 2) throw ParameterError("palm.direct must be >= 2");
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i)
        if (cfg.t_grid[i] < 0.0 || cfg.t_grid[i] > 1.0 || (i && cfg.t_grid[i] < cfg.t_grid[i - 1]))
            throw ParameterError("t.grid must be sorted within [0, 1]");
}

int exit_code_for(ErrorClass c) {
    switch (c) {
        case ErrorClass::Config: return 3;
        case ErrorClass::Parameter:
        case ErrorClass::Domain:
        case ErrorClass::Unsupported: return 4;
        case ErrorClass::Solver:
        case ErrorClass::Structural: return 5;
        case ErrorClass::Io: return 6;
    }
    return 7;
}

namespace {

using Outputs = std::vector<std::pair<std::string, std::string>>;

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

RadialDensity density_of(const CliConfig& c) { return c.exp.density(); }

Outputs run_sample(const CliConfig& c) {
    const RadialDensity f = density_of(c);
    const double n = c.exp.n_grid.front();
    PointCloud cl = sample_cloud(n, f, derive_seed(c.exp.master_seed, 0));
    CsvTable t;
    t.header = {"index"};
    for (int j = 0; j < f.dim(); ++j) t.header.push_back("x" + std::to_string(j + 1));
    t.header.push_back("norm");
    for (std::size_t i = 0; i < cl.size(); ++i) {
        std::vector<std::string> row{std::to_string(i)};
        for (int j = 0; j < f.dim(); ++j) row.push_back(format_double(cl.points[i][j]));
        row.push_back(format_double(cl.points.norm(i)));
        t.add(std::move(row));
    }
    ojson j;
    j["n"] = json_double(n);
    j["seed"] = cl.seed;
    j["points"] = cl.size();
    j["normalizing_constant"] = json_double(f.scale_C());
    return {{"points.csv", t.str()}, {"sample.json", dump(j)}};
}

Outputs run_solve_scaling(const CliConfig& c) {
    const RadialDensity f = density_of(c);
    CsvTable t;
    t.header = {"n", "k", "r_n", "R_kn", "c_kn", "d_kn", "closed_form", "residual"};
    ojson rows = ojson::array();
    for (double n : c.exp.n_grid) {
        double r = c.exp.rn(n);
        ScalingSolution s;
        if (c.scaling_C <= 0.0)
            s = solve_R(n, c.exp.k, f, r);
        else if (c.exp.family == Family::HeavyPolynomial)
            s = solve_R_heavy(n, c.exp.k, c.exp.d, c.exp.alpha, c.scaling_C, r);
        else
            s = solve_R_light(n, c.exp.k, c.exp.d, c.exp.tau, c.scaling_C, r);
        t.add({format_double(n), std::to_string(c.exp.k), format_double(r), format_double(s.R_kn),
               format_double(s.c_kn), format_double(s.d_kn), format_double(s.closed_form),
               format_double(s.residual)});
        ojson e = to_json(s);
        e["n"] = json_double(n);
        e["r_n"] = json_double(r);
        rows.push_back(std::move(e));
    }
    ojson j;
    j["family"] = family_key(c.exp.family);
    if (c.exp.family != Family::HeavyPolynomial)
        j["regime"] = classify_regime(f, c.exp.rn, c.exp.k, c.exp.n_grid).to_string();
    j["solutions"] = std::move(rows);
    return {{"scaling.csv", t.str()}, {"scaling.json", dump(j)}};
}

Outputs run_integrate_h(const CliConfig& c) {
    McEstimate e = integrate_h(c.exp.constraint, c.exp.d, c.exp.lambda_mc_samples,
                               derive_seed(c.exp.master_seed, 0));
    CsvTable t;
    t.header = {"constraint", "k", "d", "estimate", "stderr", "samples"};
    t.add({constraint_name(c.exp.constraint.kind), std::to_string(c.exp.k), std::to_string(c.exp.d),
           format_double(e.estimate), format_double(e.stderr_), std::to_string(c.exp.lambda_mc_samples)});
    ojson j;
    j["constraint"] = constraint_name(c.exp.constraint.kind);
    j["k"] = c.exp.k;
    j["d"] = c.exp.d;
    j["proximity_bound"] = json_double(proximity_bound(c.exp.constraint));
    j["estimate"] = json_double(e.estimate);
    j["stderr"] = json_double(e.stderr_);
    return {{"integrate_h.csv", t.str()}, {"integrate_h.json", dump(j)}};
}

Outputs census_outputs(const CensusReport& r) {
    return {{"counts.csv", census_counts_csv(r).str()},
            {"plot.csv", census_plot_csv(r).str()},
            {"census.json", dump(to_json(r))}};
}

Outputs run_census(CliConfig c, Statistic forced, bool force) {
    if (force) c.exp.statistic = forced;
    return census_outputs(run_replications(c.exp));
}

Outputs run_maxima(CliConfig c) {
    c.exp.statistic = Statistic::MaximaEndpoint;
    CensusReport r = run_replications(c.exp);
    const RadialDensity f = density_of(c);
    CsvTable t, path;
    t.header = {"replication", "n", "value", "seed"};
    path.header = {"n", "t", "value"};
    ojson pts = ojson::array();
    std::uint64_t lseed = derive_seed(c.exp.master_seed, 0xffffffffffULL);
    std::function<double(double)> cdf;
    double lambda = std::numeric_limits<double>::quiet_NaN();
    std::string law = "none";
    if (c.exp.family == Family::HeavyPolynomial) {
        McEstimate h = integrate_h(c.exp.constraint, c.exp.d, c.exp.lambda_mc_samples, lseed);
        lambda = frechet_prefactor(c.exp.k, c.exp.d, c.exp.alpha, h.estimate);
        double beta = c.exp.alpha * c.exp.k - c.exp.d;
        cdf = [lambda, beta](double x) { return x > 0.0 ? std::exp(-lambda * std::pow(x, -beta)) : 0.0; };
        law = "frechet";
    } else {
        Regime reg = classify_regime(f, c.exp.rn, c.exp.k, c.exp.n_grid);
        if (reg.kind == Regime::Kind::Nontrivial) {
            lambda = gumbel_prefactor(c.exp.k, c.exp.d, reg.c, c.exp.constraint, c.exp.lambda_mc_samples, lseed)
                         .estimate;
            int k = c.exp.k;
            cdf = [lambda, k](double x) { return std::exp(-lambda * std::exp(-k * x)); };
            law = "gumbel";
        }
    }
    for (const auto& p : r.points) {
        for (std::size_t i = 0; i < p.values.size(); ++i)
            t.add({std::to_string(i), format_double(p.n), format_double(p.values[i]), std::to_string(p.seeds[i])});
        PointCloud cl = sample_cloud(p.n, f, p.seeds.front());
        MaximaPath mp = maxima_path(cl.points, c.exp.constraint, p.r_n, p.scaling, c.t_grid);
        for (std::size_t i = 0; i < mp.t.size(); ++i)
            path.add({format_double(p.n), format_double(mp.t[i]), format_double(mp.value[i])});
        ojson e;
        e["n"] = json_double(p.n);
        e["scaling"] = to_json(p.scaling);
        if (cdf) {
            // Replications without a qualifying tuple sit at -inf, where the CDF is 0.
            std::vector<double> v = p.values;
            for (double& x : v)
                if (std::isinf(x)) x = -1e300;
            e["ks_distance"] = json_double(ks_one_sample(v, cdf));
        }
        pts.push_back(std::move(e));
    }
    ojson j;
    j["law"] = law;
    j["prefactor"] = json_double(lambda);
    j["points"] = std::move(pts);
    return {{"maxima.csv", t.str()}, {"maxima_path.csv", path.str()}, {"maxima.json", dump(j)}};
}

Outputs run_sums(CliConfig c) {
    c.exp.statistic = Statistic::PartialSum;
    if (c.exp.family != Family::HeavyPolynomial) throw UnsupportedError("partial sums need a heavy tail");
    CensusReport r = run_replications(c.exp);
    McEstimate h = integrate_h(c.exp.constraint, c.exp.d, c.exp.lambda_mc_samples,
                               derive_seed(c.exp.master_seed, 0xffffffffffULL));
    StableSeriesSpec spec = StableSeriesSpec::from_h_integral(c.exp.alpha, h.estimate, c.stable_terms);
    std::vector<double> stable(c.exp.replications);
    for (int i = 0; i < c.exp.replications; ++i)
        stable[i] = stable_series_sample(spec, derive_seed(c.exp.master_seed, replication_stream(0xfffff, i)));
    CsvTable t, st;
    t.header = {"replication", "n", "value", "seed"};
    st.header = {"draw", "value"};
    for (int i = 0; i < c.exp.replications; ++i) st.add({std::to_string(i), format_double(stable[i])});
    ojson pts = ojson::array();
    for (const auto& p : r.points) {
        for (std::size_t i = 0; i < p.values.size(); ++i)
            t.add({std::to_string(i), format_double(p.n), format_double(p.values[i]), std::to_string(p.seeds[i])});
        ojson e;
        e["n"] = json_double(p.n);
        e["R_kn"] = json_double(p.scaling.R_kn);
        e["mean"] = json_double(p.mean);
        e["ks_two_sample"] = json_double(ks_two_sample(p.values, stable));
        pts.push_back(std::move(e));
    }
    ojson j;
    j["C_alpha"] = json_double(spec.C_alpha);
    j["stable_terms"] = spec.n_terms;
    j["tail_variance_bound"] = json_double(spec.tail_variance_bound());
    j["points"] = std::move(pts);
    return {{"sums.csv", t.str()}, {"stable.csv", st.str()}, {"sums.json", dump(j)}};
}

Outputs run_annuli(const CliConfig& c) {
    const RadialDensity f = density_of(c);
    std::vector<Constraint> graphs;
    for (int m = 2; m <= c.annuli_k_max; ++m) graphs.push_back(Constraint::connected(m));
    CsvTable t;
    t.header = {"n", "replication", "row", "R_outer", "R_inner", "size", "count"};
    ojson pts = ojson::array();
    for (std::size_t p = 0; p < c.exp.n_grid.size(); ++p) {
        const double n = c.exp.n_grid[p], r = c.exp.rn(n);
        std::vector<double> radii;
        for (int m = 2; m <= c.annuli_k_max; ++m) radii.push_back(solve_R(n, m, f, r).R_kn);
        for (std::size_t i = 1; i < radii.size(); ++i)
            if (!(radii[i] < radii[i - 1])) throw SolverError("R_kn is not decreasing in k at this n");
        std::vector<AnnuliTable> tables(c.exp.replications);
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < c.exp.replications; ++i) {
            auto seed = derive_seed(c.exp.master_seed, replication_stream(p, i));
            PointCloud cl = c.exp.restricted_sampler
                                ? sample_cloud_beyond(n, f, std::max(0.0, radii.back() - r), seed)
                                : sample_cloud(n, f, seed);
            tables[i] = annuli_census(cl.points, r, radii, graphs);
        }
        std::vector<std::vector<double>> mean(radii.size(), std::vector<double>(graphs.size(), 0.0));
        for (int i = 0; i < c.exp.replications; ++i)
            for (std::size_t row = 0; row < radii.size(); ++row)
                for (std::size_t col = 0; col < graphs.size(); ++col) {
                    long v = tables[i].counts[row][col];
                    mean[row][col] += static_cast<double>(v) / c.exp.replications;
                    t.add({format_double(n), std::to_string(i), std::to_string(row),
                           row == 0 ? "inf" : format_double(radii[row - 1]), format_double(radii[row]),
                           std::to_string(graphs[col].k), std::to_string(v)});
                }
        ojson e;
        e["n"] = json_double(n);
        e["radii"] = radii;
        e["sizes"] = tables.front().sizes;
        ojson m = ojson::array();
        for (auto& row : mean) m.push_back(row);
        e["mean_counts"] = std::move(m);
        pts.push_back(std::move(e));
    }
    ojson j;
    j["points"] = std::move(pts);
    return {{"annuli.csv", t.str()}, {"annuli.json", dump(j)}};
}

Outputs run_contractibility(const CliConfig& c) {
    const RadialDensity f = density_of(c);
    CsvTable t;
    t.header = {"n", "r_n", "R0", "R1", "gap_over_r", "window_start", "eps_bound", "covered", "empty_beyond",
                "joint", "joint_stderr"};
    for (std::size_t p = 0; p < c.exp.n_grid.size(); ++p) {
        const double n = c.exp.n_grid[p];
        if (c.exp.d == 1) {
            ContractibilityEstimate e = estimate_contractibility(n, f, c.exp.rn, c.delta, c.g, c.trials,
                                                                 derive_seed(c.exp.master_seed, p));
            const auto& R = e.plan.radii;
            t.add({format_double(n), format_double(R.r_n), format_double(R.R0), format_double(R.R1),
                   format_double((R.R1 - R.R0) / R.r_n), format_double(e.plan.a), format_double(e.plan.eps_bound),
                   format_double(e.covered), format_double(e.empty_beyond), format_double(e.joint),
                   format_double(e.joint_stderr)});
        } else {
            ContractibilityRadii R = contractibility_radii(n, f, c.exp.rn, c.delta, c.g);
            t.add({format_double(n), format_double(R.r_n), format_double(R.R0), format_double(R.R1),
                   format_double((R.R1 - R.R0) / R.r_n), "nan", "nan", "nan", "nan", "nan", "nan"});
        }
    }
    return {{"contractibility.csv", t.str()}};
}

Outputs run_palm(const CliConfig& c) {
    auto f = std::make_shared<const RadialDensity>(density_of(c));
    CsvTable t;
    t.header = {"n", "R", "direct", "direct_stderr", "palm", "palm_stderr", "combined_stderr", "z"};
    for (std::size_t p = 0; p < c.exp.n_grid.size(); ++p) {
        PalmConfig pc;
        pc.density = f;
        pc.n = c.exp.n_grid[p];
        pc.constraint = c.exp.constraint;
        pc.r = c.exp.rn(pc.n);
        pc.R = solve_R(pc.n, c.exp.k, *f, pc.r).R_kn;
        pc.direct_replications = c.palm_direct;
        pc.palm_samples = c.palm_samples;
        pc.seed = derive_seed(c.exp.master_seed, p);
        PalmResult res = palm_crosscheck(pc);
        double z = res.combined_stderr > 0.0 ? (res.direct - res.palm) / res.combined_stderr : 0.0;
        t.add({format_double(pc.n), format_double(pc.R), format_double(res.direct),
               format_double(res.direct_stderr), format_double(res.palm), format_double(res.palm_stderr),
               format_double(res.combined_stderr), format_double(z)});
    }
    return {{"palm.csv", t.str()}};
}

const char* subcommand_help(const std::string& name) {
    static const std::map<std::string, const char*> h = {
        {"sample", "draw one cloud and write its points"},
        {"solve-scaling", "R_kn, c_kn, d_kn along the n grid"},
        {"integrate-h", "Monte Carlo integral of the constraint indicator"},
        {"census", "replicated counts of isolated tuples with Poisson fits"},
        {"betti", "replicated Betti numbers outside the ball of radius R_kn"},
        {"maxima", "running maxima paths and the endpoint law"},
        {"sums", "partial sums of isolated pairs and stable series draws"},
        {"annuli", "component census per annulus between consecutive R_kn"},
        {"contractibility", "radii R0, R1 and the simulated joint event"},
        {"palm-check", "direct vs Palm estimate of the isolated-pair mean"},
    };
    return h.at(name);
}

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s = {"sample", "solve-scaling", "integrate-h", "census",
                                               "betti", "maxima", "sums", "annuli",
                                               "contractibility", "palm-check"};
    return s;
}

Outputs run_subcommand(const std::string& name, const CliConfig& c) {
    if (name == "sample") return run_sample(c);
    if (name == "solve-scaling") return run_solve_scaling(c);
    if (name == "integrate-h") return run_integrate_h(c);
    if (name == "census") return run_census(c, Statistic::Crackle, false);
    if (name == "betti") return run_census(c, Statistic::Betti, true);
    if (name == "maxima") return run_maxima(c);
    if (name == "sums") return run_sums(c);
    if (name == "annuli") return run_annuli(c);
    if (name == "contractibility") return run_contractibility(c);
    if (name == "palm-check") return run_palm(c);
    throw ConfigError("unknown subcommand '" + name + "'");
}

void write_error(std::ostream& err, const std::string& cls, const std::string& msg, int code) {
    ojson j;
    j["error"]["class"] = cls;
    j["error"]["message"] = msg;
    j["error"]["exit_code"] = code;
    err << j.dump() << "\n";
}

int execute(const std::string& sub, CliConfig cfg, const std::string& out_override, std::ostream& out) {
    auto t0 = std::chrono::steady_clock::now();
    if (!out_override.empty()) cfg.output_dir = out_override;
    validate_config(cfg);
    Outputs files = run_subcommand(sub, cfg);
    std::filesystem::path dir(cfg.output_dir);
    ojson manifest;
    manifest["tool"] = "crackle";
    manifest["version"] = kToolVersion;
    manifest["subcommand"] = sub;
    manifest["seed"] = cfg.exp.master_seed;
    ojson conf;
    for (const auto& s : key_specs()) conf[s.key] = s.get(cfg);
    manifest["config"] = std::move(conf);
    ojson list = ojson::array();
    for (const auto& [name, text] : files) {
        write_text_file(dir / name, text);
        list.push_back((dir / name).string());
    }
    manifest["outputs"] = std::move(list);
    manifest["runtime_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text_file(dir / "manifest.json", dump(manifest));
    for (const auto& [name, text] : files) out << (dir / name).string() << "\n";
    out << (dir / "manifest.json").string() << "\n";
    return 0;
}

CliConfig config_from_manifest(const ojson& m, std::string& sub) {
    if (!m.contains("subcommand") || !m.contains("config") || !m["config"].is_object())
        throw ConfigError("manifest lacks subcommand or config");
    sub = m["subcommand"].get<std::string>();
    std::string text;
    for (auto& [k, v] : m["config"].items()) {
        if (!v.is_string()) throw ConfigError("manifest config values must be strings");
        text += k + " = " + v.get<std::string>() + "\n";
    }
    return parse_config_text(text, "manifest");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Crackle laboratory: point clouds, isolated components and their limit laws", "crackle"};
    app.set_version_flag("--version", kToolVersion);
    std::string replay, replay_out;
    app.add_option("--replay", replay, "Re-run the command recorded in a manifest.json");
    app.add_option("--out", replay_out, "Output directory (overrides output.dir)");
    app.require_subcommand(0, 1);

    struct SubOpts {
        std::string config;
        std::vector<std::string> sets;
        std::string out;
    };
    std::map<std::string, SubOpts> opts;
    std::map<std::string, CLI::App*> subs;
    for (const auto& name : subcommands()) {
        auto* s = app.add_subcommand(name, subcommand_help(name));
        auto& o = opts[name];
        s->add_option("-c,--config", o.config, "key = value config file");
        s->add_option("-s,--set", o.sets, "Override a config key (key=value), repeatable");
        s->add_option("-o,--out", o.out, "Output directory (overrides output.dir)");
        subs[name] = s;
    }

    std::vector<std::string> argv_store;
    argv_store.push_back("crackle");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        write_error(err, "usage", e.what(), 2);
        return 2;
    }

    try {
        if (!replay.empty()) {
            if (!app.get_subcommands().empty()) {
                write_error(err, "usage", "--replay cannot be combined with a subcommand", 2);
                return 2;
            }
            ojson m;
            try {
                m = ojson::parse(read_text_file(replay));
            } catch (const ojson::exception& e) {
                throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
            }
            std::string sub;
            CliConfig cfg = config_from_manifest(m, sub);
            return execute(sub, cfg, replay_out, out);
        }
        if (app.get_subcommands().empty()) {
            write_error(err, "usage", "a subcommand or --replay is required", 2);
            return 2;
        }
        std::string name = app.get_subcommands().front()->get_name();
        const SubOpts& o = opts[name];
        CliConfig cfg = o.config.empty() ? CliConfig{} : load_config(o.config);
        for (const auto& kv : o.sets) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
            apply_setting(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
        }
        return execute(name, cfg, o.out.empty() ? replay_out : o.out, out);
    } catch (const Error& e) {
        int code = exit_code_for(e.error_class());
        write_error(err, error_class_name(e.error_class()), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        write_error(err, "other", e.what(), 7);
        return 7;
    }
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace crackle
