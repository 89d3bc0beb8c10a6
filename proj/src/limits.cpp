#include "crackle/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crackle/errors.hpp"
#include "crackle/parallel.hpp"

namespace crackle {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

void check_kd(int k, int d) {
    if (k < 2 || k > 8) throw ParameterError("k must be in 2..8");
    if (d < 1) throw ParameterError("dimension must be >= 1");
}

double box_half_width(const Constraint& c, double half_width) {
    return half_width > 0.0 ? half_width : proximity_bound(c);
}

// Draws y uniformly in [-M, M]^{d(k-1)} into pts (row 0 stays at the origin).
void draw_offsets(Rng& rng, Points& pts, double M) {
    for (std::size_t i = pts.dim; i < pts.coords.size(); ++i) pts.coords[i] = rng.uniform(-M, M);
}

McEstimate integrate_h_impl(const Constraint& c, int d, std::size_t mc_samples, std::uint64_t seed,
                            double half_width, bool parallel) {
    check_kd(c.k, d);
    const double M = box_half_width(c, half_width);
    const double vol = std::pow(2.0 * M, d * (c.k - 1));
    auto draw = [&](Rng& rng) {
        Points pts(d, std::vector<double>(static_cast<std::size_t>(d) * c.k, 0.0));
        draw_offsets(rng, pts, M);
        return vol * evaluate_h(c, pts, 1.0);
    };
    return mc_mean(mc_samples, seed, draw, parallel);
}

struct XDomain {
    std::vector<double> lo, hi;
    bool empty = false;
    bool bounded = true;
    double rho_min = 0.0;
};

XDomain intersect(const std::vector<Box>& rect, int d) {
    XDomain x;
    const double inf = std::numeric_limits<double>::infinity();
    x.lo.assign(d, -inf);
    x.hi.assign(d, inf);
    for (const auto& b : rect) {
        if (static_cast<int>(b.lo.size()) != d || static_cast<int>(b.hi.size()) != d)
            throw ParameterError("box dimension does not match d");
        for (int j = 0; j < d; ++j) {
            x.lo[j] = std::max(x.lo[j], b.lo[j]);
            x.hi[j] = std::min(x.hi[j], b.hi[j]);
        }
    }
    double r2 = 0.0;
    bool touches = true;
    for (int j = 0; j < d; ++j) {
        if (!(x.lo[j] < x.hi[j])) x.empty = true;
        if (!std::isfinite(x.lo[j]) || !std::isfinite(x.hi[j])) x.bounded = false;
        double gap = x.lo[j] > 0.0 ? x.lo[j] : (x.hi[j] < 0.0 ? -x.hi[j] : 0.0);
        if (gap > 0.0) touches = false;
        r2 += gap * gap;
    }
    x.rho_min = std::sqrt(r2);
    if (!x.empty && touches)
        throw DomainError("rectangle is not bounded away from the origin");
    return x;
}

bool inside(const XDomain& x, const double* p, int d) {
    for (int j = 0; j < d; ++j)
        if (!(p[j] > x.lo[j] && p[j] <= x.hi[j])) return false;
    return true;
}

}  // namespace

McEstimate integrate_h(const Constraint& c, int d, std::size_t mc_samples, std::uint64_t seed,
                       double half_width) {
    return integrate_h_impl(c, d, mc_samples, seed, half_width, true);
}

namespace reference {
McEstimate integrate_h(const Constraint& c, int d, std::size_t mc_samples, std::uint64_t seed,
                       double half_width) {
    return integrate_h_impl(c, d, mc_samples, seed, half_width, false);
}
}  // namespace reference

double nu_heavy_tail_mass(int k, int d, double alpha, double h_integral, double eta) {
    check_kd(k, d);
    double beta = alpha * k - d;
    if (!(beta > 0.0)) throw DomainError("need alpha k > d");
    if (!(eta > 0.0)) throw ParameterError("eta must be positive");
    if (h_integral < 0.0) throw ParameterError("h integral must be non-negative");
    return sphere_surface_area(d) / (beta * factorial(k)) * h_integral * std::pow(eta, -beta);
}

McEstimate heavy_x_integral(const std::vector<Box>& rect, int d, double alpha, int k,
                            std::size_t mc_samples, std::uint64_t seed) {
    check_kd(k, d);
    if (static_cast<int>(rect.size()) != k) throw ParameterError("rectangle needs k boxes");
    const double beta = alpha * k - d;
    if (!(beta > 0.0)) throw DomainError("need alpha k > d");
    XDomain x = intersect(rect, d);
    if (x.empty) return {};
    if (x.bounded) {
        double vol = 1.0;
        for (int j = 0; j < d; ++j) vol *= x.hi[j] - x.lo[j];
        auto draw = [&](Rng& rng) {
            std::vector<double> p(d);
            double n2 = 0.0;
            for (int j = 0; j < d; ++j) {
                p[j] = rng.uniform(x.lo[j], x.hi[j]);
                n2 += p[j] * p[j];
            }
            return vol * std::pow(n2, -0.5 * alpha * k);
        };
        return mc_mean(mc_samples, seed, draw);
    }
    // Radial Pareto proposal on |x| >= rho_min; the weight is then constant.
    const double w = sphere_surface_area(d) / (beta * std::pow(x.rho_min, beta));
    auto draw = [&](Rng& rng) {
        std::vector<double> p(d);
        sample_direction(rng, d, p.data());
        double rho = x.rho_min * std::pow(rng.uniform_open0(), -1.0 / beta);
        for (double& v : p) v *= rho;
        return inside(x, p.data(), d) ? w : 0.0;
    };
    return mc_mean(mc_samples, seed, draw);
}

RectangleEstimate nu_heavy_rectangle(const std::vector<Box>& rect, int k, int d, double alpha,
                                     const Constraint& c, std::size_t mc_samples, std::uint64_t seed) {
    if (c.k != k) throw ParameterError("constraint size does not match k");
    RectangleEstimate out;
    out.x_factor = heavy_x_integral(rect, d, alpha, k, mc_samples, derive_seed(seed, 1));
    McEstimate h = integrate_h(c, d, mc_samples, derive_seed(seed, 2));
    double kf = factorial(k);
    out.h_factor = {h.estimate / kf, h.stderr_ / kf};
    out.estimate = out.x_factor.estimate * out.h_factor.estimate;
    out.stderr_ = std::hypot(out.x_factor.stderr_ * out.h_factor.estimate,
                             out.x_factor.estimate * out.h_factor.stderr_);
    return out;
}

McEstimate poisson_mean_light(int k, int d, double c, const Constraint& constraint,
                              std::size_t mc_samples, std::uint64_t seed) {
    check_kd(k, d);
    if (constraint.k != k) throw ParameterError("constraint size does not match k");
    if (!(c > 0.0)) throw ParameterError("regime constant c must be positive");
    const double M = proximity_bound(constraint);
    const double weight = std::pow(2.0 * M, d * (k - 1)) * sphere_surface_area(d) / factorial(k);
    const bool infinite = std::isinf(c);
    auto draw = [&](Rng& rng) {
        Points pts(d, std::vector<double>(static_cast<std::size_t>(d) * k, 0.0));
        draw_offsets(rng, pts, M);
        std::vector<double> theta(d);
        sample_direction(rng, d, theta.data());
        if (!evaluate_h(constraint, pts, 1.0)) return 0.0;
        if (infinite) return weight / k;
        double rho0 = 0.0, tsum = 0.0;
        for (int i = 1; i < k; ++i) {
            double t = 0.0;
            for (int j = 0; j < d; ++j) t += theta[j] * pts[i][j];
            tsum += t;
            rho0 = std::max(rho0, -t / c);
        }
        return weight * std::exp(-k * rho0 - tsum / c) / k;
    };
    return mc_mean(mc_samples, seed, draw);
}

McEstimate gumbel_prefactor(int k, int d, double c, const Constraint& constraint,
                            std::size_t mc_samples, std::uint64_t seed) {
    check_kd(k, d);
    if (constraint.k != k) throw ParameterError("constraint size does not match k");
    if (!(c > 0.0)) throw ParameterError("regime constant c must be positive");
    const double M = proximity_bound(constraint);
    const double weight = std::pow(2.0 * M, d * (k - 1)) * sphere_surface_area(d) / (factorial(k) * k);
    const double cinv = std::isinf(c) ? 0.0 : 1.0 / c;
    auto draw = [&](Rng& rng) {
        Points pts(d, std::vector<double>(static_cast<std::size_t>(d) * k, 0.0));
        draw_offsets(rng, pts, M);
        std::vector<double> theta(d);
        sample_direction(rng, d, theta.data());
        if (!evaluate_h(constraint, pts, 1.0)) return 0.0;
        double tsum = 0.0;
        for (int i = 1; i < k; ++i)
            for (int j = 0; j < d; ++j) tsum += theta[j] * pts[i][j];
        return weight * std::exp(-cinv * tsum);
    };
    return mc_mean(mc_samples, seed, draw);
}

namespace {

void check_times(const std::vector<double>& t, const std::vector<double>& eta) {
    if (t.empty() || t.size() != eta.size()) throw ParameterError("times and thresholds must match");
    double prev = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        bool ok = i == 0 ? (t[0] >= 0.0) : (t[i] > prev);
        if (!ok || t[i] > 1.0) throw ParameterError("times must satisfy 0 <= t_1 < ... < t_K <= 1");
        prev = t[i];
    }
}

// sum_i (t_i^k - t_{i-1}^k) g(min_{j >= i} eta_j)
template <class G>
double time_weighted(const std::vector<double>& t, const std::vector<double>& eta, int k, G g) {
    std::vector<double> suffix_min(eta.size());
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = eta.size(); i-- > 0;) {
        m = std::min(m, eta[i]);
        suffix_min[i] = m;
    }
    double s = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double w = std::pow(t[i], k) - prev;
        prev = std::pow(t[i], k);
        if (w > 0.0) s += w * g(suffix_min[i]);
    }
    return s;
}

}  // namespace

double frechet_prefactor(int k, int d, double alpha, double h_integral) {
    return nu_heavy_tail_mass(k, d, alpha, h_integral, 1.0);
}

double frechet_fidi(const std::vector<double>& times, const std::vector<double>& thresholds, int k,
                    int d, double alpha, double h_integral) {
    check_times(times, thresholds);
    for (double e : thresholds)
        if (!(e > 0.0)) throw ParameterError("thresholds must be positive");
    const double lam = frechet_prefactor(k, d, alpha, h_integral);
    const double beta = alpha * k - d;
    double s = time_weighted(times, thresholds, k, [beta](double e) {
        return std::isinf(e) ? 0.0 : std::pow(e, -beta);
    });
    return std::exp(-lam * s);
}

double gumbel_fidi(const std::vector<double>& times, const std::vector<double>& thresholds, int k,
                   double prefactor) {
    check_times(times, thresholds);
    if (prefactor < 0.0) throw ParameterError("prefactor must be non-negative");
    double s = time_weighted(times, thresholds, k, [k](double e) { return std::exp(-k * e); });
    return std::exp(-prefactor * s);
}

StableSeriesSpec StableSeriesSpec::from_h_integral(double alpha, double h_integral, std::size_t n_terms) {
    if (!(alpha > 1.0 && alpha < 1.5)) throw DomainError("stable series needs 1 < alpha < 1.5");
    if (!(h_integral > 0.0)) throw ParameterError("h integral must be positive");
    StableSeriesSpec s;
    s.alpha = alpha;
    s.n_terms = n_terms;
    s.C_alpha = std::pow(h_integral / (2.0 * alpha - 1.0), 1.0 / (2.0 * alpha - 1.0));
    return s;
}

double StableSeriesSpec::tail_variance_bound() const {
    double p = 2.0 / (2.0 * alpha - 1.0);
    double N = static_cast<double>(n_terms);
    return C_alpha * C_alpha * std::pow(N, 1.0 - p) / (p - 1.0);
}

double stable_series_sample(const StableSeriesSpec& spec, std::uint64_t seed, bool flip_signs) {
    if (!(spec.alpha > 1.0 && spec.alpha < 1.5)) throw DomainError("stable series needs 1 < alpha < 1.5");
    if (spec.n_terms == 0) throw ParameterError("n_terms must be positive");
    Rng rng(seed);
    const double e = -1.0 / (2.0 * spec.alpha - 1.0);
    double gamma = 0.0, sum = 0.0;
    for (std::size_t j = 0; j < spec.n_terms; ++j) {
        gamma += rng.exponential();
        int r = rng.sign();
        if (flip_signs) r = -r;
        sum += r * std::pow(gamma, e);
    }
    return spec.C_alpha * sum;
}

}  // namespace crackle
