#include "crackle/census.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "crackle/errors.hpp"
#include "crackle/geometry.hpp"
#include "crackle/limits.hpp"
#include "crackle/parallel.hpp"

namespace crackle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<int> indices_beyond(const Points& points, double R) {
    std::vector<int> sel;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points.norm(i) >= R) sel.push_back(static_cast<int>(i));
    return sel;
}

using Adjacency = std::vector<std::vector<int>>;

Adjacency adjacency_of(const Points& pts, double r) {
    GeometricGraph g = build_geometric_graph(pts, r);
    Adjacency adj(pts.size());
    for (auto [a, b] : g.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& v : adj) std::sort(v.begin(), v.end());
    return adj;
}

bool adjacent(const Adjacency& adj, int a, int b) {
    return std::binary_search(adj[a].begin(), adj[a].end(), b);
}

// Enumerates every connected induced subgraph on m vertices exactly once (ESU).
template <class F>
void for_each_connected_subset(const Adjacency& adj, int m, F&& f) {
    std::vector<int> sub;
    auto in_closed_nbhd = [&](int u) {
        for (int s : sub)
            if (s == u || adjacent(adj, s, u)) return true;
        return false;
    };
    std::function<void(std::vector<int>, int)> extend = [&](std::vector<int> ext, int v) {
        if (static_cast<int>(sub.size()) == m) {
            f(sub);
            return;
        }
        while (!ext.empty()) {
            int w = ext.back();
            ext.pop_back();
            std::vector<int> next = ext;
            for (int u : adj[w])
                if (u > v && !in_closed_nbhd(u)) next.push_back(u);
            sub.push_back(w);
            extend(std::move(next), v);
            sub.pop_back();
        }
    };
    for (int v = 0; v < static_cast<int>(adj.size()); ++v) {
        std::vector<int> ext;
        for (int u : adj[v])
            if (u > v) ext.push_back(u);
        sub.assign(1, v);
        if (m == 1) {
            f(sub);
            continue;
        }
        extend(std::move(ext), v);
    }
}

void check_constraint(const Constraint& c, int k) {
    if (c.k != k) throw ParameterError("constraint size does not match k");
}

}  // namespace

long count_crackle_tuples(const Points& points, int k, const Constraint& c, double r, double R) {
    check_constraint(c, k);
    if (!(R > 0.0)) throw ParameterError("R must be positive");
    long count = 0;
    for (const auto& comp : components_beyond(points, r, R)) {
        if (static_cast<int>(comp.size()) != k) continue;
        count += evaluate_h(c, points.subset(comp), r);
    }
    return count;
}

long count_connected_tuples(const Points& points, int k_plus_1, double r, double R) {
    if (k_plus_1 < 1) throw ParameterError("subset size must be >= 1");
    Points out = points.subset(indices_beyond(points, R));
    if (out.size() < static_cast<std::size_t>(k_plus_1)) return 0;
    long count = 0;
    for_each_connected_subset(adjacency_of(out, r), k_plus_1, [&](const std::vector<int>&) { ++count; });
    return count;
}

long count_constrained_tuples(const Points& points, const Constraint& c, double r, double R) {
    Points out = points.subset(indices_beyond(points, R));
    if (out.size() < static_cast<std::size_t>(c.k)) return 0;
    long count = 0;
    // Every supported h forces a connected graph, so connected subsets suffice.
    for_each_connected_subset(adjacency_of(out, r), c.k, [&](const std::vector<int>& s) {
        count += c.kind == ConstraintKind::Connected ? 1 : evaluate_h(c, out.subset(s), r);
    });
    return count;
}

long betti_outside_ball(const Points& points, double r, double R, int betti_index) {
    if (betti_index < 0) throw ParameterError("betti index must be >= 0");
    Points out = points.subset(indices_beyond(points, R));
    if (out.empty()) return 0;
    auto comps = connected_components(out, r);
    if (betti_index == 0) return static_cast<long>(comps.size());
    long total = 0;
    for (const auto& comp : comps) {
        if (static_cast<int>(comp.size()) < betti_index + 2) continue;
        SimplicialComplex K = cech_complex(out.subset(comp), r, betti_index + 1);
        total += betti_numbers(K, betti_index + 1)[betti_index];
    }
    return total;
}

AnnuliTable annuli_census(const Points& points, double r, const std::vector<double>& radii,
                          const std::vector<Constraint>& graphs) {
    if (radii.empty()) throw ParameterError("need at least one radius");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] < radii[i - 1])) throw ParameterError("radii must be strictly decreasing");
    if (!(radii.back() > 0.0)) throw ParameterError("radii must be positive");
    AnnuliTable t;
    t.radii = radii;
    for (const auto& g : graphs) t.sizes.push_back(g.k);
    t.counts.assign(radii.size(), std::vector<long>(graphs.size(), 0));
    for (const auto& comp : components_beyond(points, r, radii.back())) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int v : comp) {
            double nr = points.norm(v);
            lo = std::min(lo, nr);
            hi = std::max(hi, nr);
        }
        // Row of the annulus holding the innermost point.
        std::size_t row = 0;
        while (row < radii.size() && lo < radii[row]) ++row;
        if (row == radii.size()) continue;
        if (row > 0 && !(hi < radii[row - 1])) continue;  // straddles a boundary
        Points sub;
        bool built = false;
        for (std::size_t col = 0; col < graphs.size(); ++col) {
            if (graphs[col].k != static_cast<int>(comp.size())) continue;
            if (!built) {
                sub = points.subset(comp);
                built = true;
            }
            t.counts[row][col] += evaluate_h(graphs[col], sub, r);
        }
    }
    return t;
}

MaximaPath maxima_path(const Points& points, const Constraint& c, double r, const ScalingSolution& s,
                       const std::vector<double>& t_grid) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0.0 || t_grid[i] > 1.0) throw ParameterError("t grid must lie in [0, 1]");
        if (i > 0 && t_grid[i] < t_grid[i - 1]) throw ParameterError("t grid must be sorted");
    }
    if (!(s.c_kn > 0.0)) throw ParameterError("scale c_kn must be positive");
    std::vector<std::pair<std::size_t, double>> events;  // (1-based largest index, value)
    for (const auto& comp : isolated_components_of_size(points, r, c.k)) {
        if (!evaluate_h(c, points.subset(comp), r)) continue;
        double v = (points.norm(comp.front()) - s.d_kn) / s.c_kn;
        events.emplace_back(static_cast<std::size_t>(comp.back()) + 1, v);
    }
    std::sort(events.begin(), events.end());
    MaximaPath p;
    p.t = t_grid;
    const double N = static_cast<double>(points.size());
    std::size_t e = 0;
    double run = kNegInf;
    for (double t : t_grid) {
        auto limit = static_cast<std::size_t>(std::floor(N * t));
        while (e < events.size() && events[e].first <= limit) run = std::max(run, events[e++].second);
        p.value.push_back(run);
    }
    return p;
}

double partial_sum_statistic(const Points& points, double r, double R2n, const Constraint& c) {
    if (points.dim != 1 || c.k != 2)
        throw UnsupportedError("partial sums are defined for d = 1 and k = 2 only");
    if (!(R2n > 0.0)) throw ParameterError("R must be positive");
    double sum = 0.0;
    for (const auto& comp : isolated_components_of_size(points, r, 2))
        if (evaluate_h(c, points.subset(comp), r)) sum += points[comp.front()][0];
    return sum / R2n;
}

const char* statistic_name(Statistic s) {
    switch (s) {
        case Statistic::Crackle: return "crackle";
        case Statistic::Constrained: return "constrained";
        case Statistic::Betti: return "betti";
        case Statistic::MaximaEndpoint: return "maxima";
        case Statistic::PartialSum: return "partial_sum";
    }
    return "unknown";
}

Statistic parse_statistic(const std::string& s) {
    for (Statistic v : {Statistic::Crackle, Statistic::Constrained, Statistic::Betti,
                        Statistic::MaximaEndpoint, Statistic::PartialSum})
        if (s == statistic_name(v)) return v;
    throw ConfigError("unknown statistic '" + s + "' (crackle, constrained, betti, maxima, partial_sum)");
}

RadialDensity ExperimentConfig::density() const {
    switch (family) {
        case Family::HeavyPolynomial: return RadialDensity::heavy(alpha, d);
        case Family::LightVonMises: return RadialDensity::light(tau, d);
        case Family::PluggablePsi: break;
    }
    throw ConfigError("pluggable densities are not available from a config");
}

void ExperimentConfig::validate() const {
    if (d < 1) throw ParameterError("d must be >= 1");
    if (k < 2 || k > 8) throw ParameterError("k must be in 2..8");
    if (constraint.k != k) throw ParameterError("constraint size does not match k");
    if (replications < 1) throw ParameterError("replications must be >= 1");
    if (n_grid.empty()) throw ParameterError("n grid is empty");
    for (double n : n_grid)
        if (!(n > 0.0) || !std::isfinite(n)) throw ParameterError("n must be positive and finite");
    check_power_band(rn, k, d);
    if (statistic == Statistic::PartialSum && (d != 1 || k != 2))
        throw UnsupportedError("partial sums are defined for d = 1 and k = 2 only");
}

double replication_value(const ExperimentConfig& cfg, const RadialDensity& density, double n,
                         double r_n, const ScalingSolution& s, std::uint64_t seed) {
    const double R = s.R_kn;
    switch (cfg.statistic) {
        case Statistic::Crackle: {
            PointCloud cl = cfg.restricted_sampler
                                ? sample_cloud_beyond(n, density, std::max(0.0, R - r_n), seed)
                                : sample_cloud(n, density, seed);
            return static_cast<double>(count_crackle_tuples(cl.points, cfg.k, cfg.constraint, r_n, R));
        }
        case Statistic::Constrained: {
            PointCloud cl = cfg.restricted_sampler ? sample_cloud_beyond(n, density, R, seed)
                                                   : sample_cloud(n, density, seed);
            return static_cast<double>(count_constrained_tuples(cl.points, cfg.constraint, r_n, R));
        }
        case Statistic::Betti: {
            PointCloud cl = cfg.restricted_sampler ? sample_cloud_beyond(n, density, R, seed)
                                                   : sample_cloud(n, density, seed);
            return static_cast<double>(betti_outside_ball(cl.points, r_n, R, cfg.k - 2));
        }
        case Statistic::MaximaEndpoint: {
            PointCloud cl = sample_cloud(n, density, seed);
            return maxima_path(cl.points, cfg.constraint, r_n, s, {1.0}).value.front();
        }
        case Statistic::PartialSum: {
            PointCloud cl = sample_cloud(n, density, seed);
            return partial_sum_statistic(cl.points, r_n, R, cfg.constraint);
        }
    }
    return 0.0;
}

namespace {

bool is_count(Statistic s) {
    return s == Statistic::Crackle || s == Statistic::Constrained || s == Statistic::Betti;
}

CensusReport run_impl(const ExperimentConfig& cfg, bool parallel) {
    auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    const RadialDensity density = cfg.density();
    CensusReport rep;
    rep.config = cfg;

    // Limit intensity shared by all grid points.
    double lambda = std::numeric_limits<double>::quiet_NaN(), lambda_se = 0.0;
    if (is_count(cfg.statistic)) {
        std::uint64_t lseed = derive_seed(cfg.master_seed, 0xffffffffffULL);
        if (cfg.family == Family::HeavyPolynomial) {
            McEstimate h = integrate_h(cfg.constraint, cfg.d, cfg.lambda_mc_samples, lseed);
            lambda = nu_heavy_tail_mass(cfg.k, cfg.d, cfg.alpha, h.estimate, 1.0);
            lambda_se = nu_heavy_tail_mass(cfg.k, cfg.d, cfg.alpha, h.stderr_, 1.0);
            rep.regime.kind = Regime::Kind::Nontrivial;
            rep.regime.c = std::numeric_limits<double>::infinity();
            rep.regime.note = "heavy tail";
        } else {
            rep.regime = classify_regime(density, cfg.rn, cfg.k, cfg.n_grid);
            if (rep.regime.kind == Regime::Kind::Nontrivial) {
                McEstimate m = poisson_mean_light(cfg.k, cfg.d, rep.regime.c, cfg.constraint,
                                                  cfg.lambda_mc_samples, lseed);
                lambda = m.estimate;
                lambda_se = m.stderr_;
            } else if (rep.regime.kind == Regime::Kind::Vanishing) {
                lambda = 0.0;
            }
        }
    }

    const int reps = cfg.replications;
    rep.points.resize(cfg.n_grid.size());
    for (std::size_t p = 0; p < cfg.n_grid.size(); ++p) {
        CensusPoint& cp = rep.points[p];
        cp.n = cfg.n_grid[p];
        cp.r_n = cfg.rn(cp.n);
        try {
            cp.scaling = solve_R(cp.n, cfg.k, density, cp.r_n);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "grid point n = " << cp.n << ": " << e.what();
            throw Error(e.error_class(), os.str());
        }
        cp.values.assign(reps, 0.0);
        cp.seeds.resize(reps);
        for (int i = 0; i < reps; ++i)
            cp.seeds[i] = derive_seed(cfg.master_seed, replication_stream(p, static_cast<std::uint64_t>(i)));
        cp.lambda = lambda;
        cp.lambda_stderr = lambda_se;
    }

    const long tasks = static_cast<long>(cfg.n_grid.size()) * reps;
    std::vector<std::string> errors(tasks);
    std::vector<int> error_class(tasks, -1);
    auto run_task = [&](long t) {
        CensusPoint& cp = rep.points[t / reps];
        int i = static_cast<int>(t % reps);
        try {
            cp.values[i] = replication_value(cfg, density, cp.n, cp.r_n, cp.scaling, cp.seeds[i]);
        } catch (const Error& e) {
            errors[t] = e.what();
            error_class[t] = static_cast<int>(e.error_class());
        } catch (const std::exception& e) {
            errors[t] = e.what();
            error_class[t] = static_cast<int>(ErrorClass::Structural);
        }
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long t = 0; t < tasks; ++t) run_task(t);
    } else {
        for (long t = 0; t < tasks; ++t) run_task(t);
    }
    for (long t = 0; t < tasks; ++t) {
        if (error_class[t] < 0) continue;
        std::ostringstream os;
        os << "n = " << rep.points[t / reps].n << ", replication " << t % reps << ": " << errors[t];
        throw Error(static_cast<ErrorClass>(error_class[t]), os.str());
    }

    for (auto& cp : rep.points) {
        cp.mean = sample_mean(cp.values);
        cp.variance = sample_variance(cp.values);
        if (is_count(cfg.statistic)) {
            std::vector<long> counts(cp.values.begin(), cp.values.end());
            if (std::isfinite(cp.lambda)) {
                cp.fit_theory = poisson_gof(counts, cp.lambda);
                cp.has_fit = true;
            }
            cp.fit_empirical = poisson_gof(counts, cp.mean, 1);
        }
    }
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace

CensusReport run_replications(const ExperimentConfig& cfg) { return run_impl(cfg, true); }

PalmResult palm_crosscheck(const PalmConfig& cfg) {
    if (!cfg.density) throw ParameterError("palm cross-check needs a density");
    const RadialDensity& f = *cfg.density;
    const int k = cfg.constraint.k, d = f.dim();
    if (!(cfg.n > 0.0) || cfg.n > 1e6) throw ParameterError("palm cross-check needs a small positive n");
    if (!(cfg.r > 0.0) || !(cfg.R > 0.0)) throw ParameterError("r and R must be positive");
    if (cfg.direct_replications < 2) throw ParameterError("need at least two direct replications");
    PalmResult out;

    std::vector<double> direct(cfg.direct_replications);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < cfg.direct_replications; ++i) {
        PointCloud cl = sample_cloud_beyond(cfg.n, f, std::max(0.0, cfg.R - cfg.r),
                                            derive_seed(cfg.seed, replication_stream(0, i)));
        direct[i] = static_cast<double>(count_crackle_tuples(cl.points, k, cfg.constraint, cfg.r, cfg.R));
    }
    out.direct = sample_mean(direct);
    out.direct_stderr = std::sqrt(sample_variance(direct) / direct.size());

    // First point from f restricted to |x| >= R, the others uniform in the ball of
    // radius (k-1) r around it; the isolation probability is exp(-n p(x; r)).
    const double sf_R = f.radial_sf(cfg.R);
    const double reach = (k - 1) * cfg.r;
    const double ball_vol = unit_ball_volume(d) * std::pow(reach, d);
    auto draw = [&](Rng& rng) {
        Points pts(d);
        std::vector<double> x(d);
        sample_direction(rng, d, x.data());
        double rho = f.radial_sf_quantile(sf_R * rng.uniform_open0());
        for (double& v : x) v *= rho;
        pts.push_back(x.data());
        double w = sf_R;
        for (int i = 1; i < k; ++i) {
            std::vector<double> y(d);
            sample_direction(rng, d, y.data());
            double s = reach * std::pow(rng.uniform_open0(), 1.0 / d);
            for (int j = 0; j < d; ++j) y[j] = pts[0][j] + s * y[j];
            pts.push_back(y.data());
            w *= ball_vol * f.profile(pts.norm(i));
        }
        for (int i = 0; i < k; ++i)
            if (pts.norm(i) < cfg.R) return 0.0;
        if (!evaluate_h(cfg.constraint, pts, cfg.r)) return 0.0;
        double p;
        if (d == 1) {
            p = union_of_balls_mass_1d(pts.coords, cfg.r, f);
        } else {
            p = union_of_balls_probability(pts, cfg.r, f, 20000, rng.engine()()).estimate;
        }
        return w * std::exp(-cfg.n * p);
    };
    McEstimate e = mc_mean(cfg.palm_samples, derive_seed(cfg.seed, 0xfffffffffULL), draw);
    double pref = std::pow(cfg.n, k);
    for (int i = 2; i <= k; ++i) pref /= i;
    out.palm = pref * e.estimate;
    out.palm_stderr = pref * e.stderr_;
    out.combined_stderr = std::hypot(out.direct_stderr, out.palm_stderr);
    return out;
}

namespace reference {

long count_crackle_tuples(const Points& points, int k, const Constraint& c, double r, double R) {
    check_constraint(c, k);
    long count = 0;
    for (const auto& comp : isolated_components_of_size(points, r, k)) {
        bool outside = true;
        for (int v : comp) outside = outside && points.norm(v) >= R;
        if (outside) count += evaluate_h(c, points.subset(comp), r);
    }
    return count;
}

namespace {
template <class F>
void for_each_subset(int n, int m, F&& f) {
    if (m > n) return;
    std::vector<int> idx(m);
    for (int i = 0; i < m; ++i) idx[i] = i;
    while (true) {
        f(idx);
        int i = m - 1;
        while (i >= 0 && idx[i] == n - m + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
    }
}
}  // namespace

long count_connected_tuples(const Points& points, int k_plus_1, double r, double R) {
    Points out = points.subset(indices_beyond(points, R));
    long count = 0;
    for_each_subset(static_cast<int>(out.size()), k_plus_1, [&](const std::vector<int>& s) {
        count += evaluate_h_tilde(out.subset(s), r);
    });
    return count;
}

long count_constrained_tuples(const Points& points, const Constraint& c, double r, double R) {
    Points out = points.subset(indices_beyond(points, R));
    long count = 0;
    for_each_subset(static_cast<int>(out.size()), c.k, [&](const std::vector<int>& s) {
        count += evaluate_h(c, out.subset(s), r);
    });
    return count;
}

CensusReport run_replications(const ExperimentConfig& cfg) { return run_impl(cfg, false); }

}  // namespace reference

}  // namespace crackle
