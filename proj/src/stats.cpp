#include "crackle/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <map>

#include "crackle/errors.hpp"

namespace crackle {

double sample_mean(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    double m = sample_mean(x), s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

std::vector<double> to_doubles(const std::vector<long>& counts) {
    return std::vector<double>(counts.begin(), counts.end());
}

double poisson_pmf(long k, double lambda) {
    if (k < 0) return 0.0;
    if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

double ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
    if (x.empty()) throw ParameterError("KS needs a non-empty sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double D = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double F = cdf(x[i]);
        D = std::max({D, (i + 1) / n - F, F - i / n});
    }
    return D;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ParameterError("KS needs non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double D = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        D = std::max(D, std::fabs(i / na - j / nb));
    }
    return D;
}

double hill_tail_index(std::vector<double> x, std::size_t k_top) {
    for (double& v : x) v = std::fabs(v);
    if (k_top < 1 || k_top >= x.size()) throw ParameterError("Hill needs 1 <= k_top < sample size");
    std::sort(x.begin(), x.end(), std::greater<double>());
    double ref = x[k_top];
    if (!(ref > 0.0)) throw DomainError("Hill reference order statistic is zero");
    double H = 0.0;
    for (std::size_t i = 0; i < k_top; ++i) H += std::log(x[i] / ref);
    H /= static_cast<double>(k_top);
    return 1.0 / H;
}

double tv_to_poisson(const std::vector<long>& counts, double lambda) {
    if (counts.empty()) throw ParameterError("no counts");
    if (lambda < 0.0) throw ParameterError("lambda must be non-negative");
    std::map<long, double> emp;
    for (long c : counts) {
        if (c < 0) throw ParameterError("counts must be non-negative");
        emp[c] += 1.0;
    }
    const double N = static_cast<double>(counts.size());
    long kmax = emp.rbegin()->first;
    double tv = 0.0, covered = 0.0;
    for (long k = 0; k <= kmax; ++k) {
        double p = poisson_pmf(k, lambda);
        auto it = emp.find(k);
        double e = it == emp.end() ? 0.0 : it->second / N;
        tv += std::fabs(e - p);
        covered += p;
    }
    tv += std::max(0.0, 1.0 - covered);
    return std::min(1.0, 0.5 * tv);
}

PoissonFit poisson_gof(const std::vector<long>& counts, double lambda, int fitted_params) {
    if (counts.empty()) throw ParameterError("no counts");
    if (lambda < 0.0 || !std::isfinite(lambda)) throw ParameterError("lambda must be finite and >= 0");
    PoissonFit fit;
    fit.lambda = lambda;
    fit.tv_distance = tv_to_poisson(counts, lambda);
    const double N = static_cast<double>(counts.size());
    if (lambda == 0.0) {
        bool all_zero = std::all_of(counts.begin(), counts.end(), [](long c) { return c == 0; });
        fit.bins = 1;
        fit.chi_square = all_zero ? 0.0 : std::numeric_limits<double>::infinity();
        fit.p_value = all_zero ? 1.0 : 0.0;
        return fit;
    }
    std::map<long, double> obs;
    for (long c : counts) obs[c] += 1.0;
    auto observed_in = [&](long lo, long hi) {  // [lo, hi], hi < 0 means open
        double s = 0.0;
        for (auto& [k, v] : obs)
            if (k >= lo && (hi < 0 || k <= hi)) s += v;
        return s;
    };
    struct Bin { long lo, hi; double expected; };
    std::vector<Bin> bins;
    long lo = 0;
    double acc = 0.0;
    for (long k = 0;; ++k) {
        acc += N * poisson_pmf(k, lambda);
        double tail = N * boost::math::gamma_p(static_cast<double>(k + 1), lambda);  // P(X > k)
        if (tail < 5.0) {
            bins.push_back({lo, -1, acc + tail});
            break;
        }
        if (acc >= 5.0) {
            bins.push_back({lo, k, acc});
            lo = k + 1;
            acc = 0.0;
        }
    }
    if (bins.size() > 1 && bins.back().expected < 5.0) {
        Bin last = bins.back();
        bins.pop_back();
        bins.back().hi = -1;
        bins.back().expected += last.expected;
    }
    fit.bins = static_cast<int>(bins.size());
    double chi = 0.0;
    for (const auto& b : bins) {
        double o = observed_in(b.lo, b.hi);
        chi += (o - b.expected) * (o - b.expected) / b.expected;
    }
    fit.chi_square = chi;
    fit.dof = fit.bins - 1 - fitted_params;
    fit.p_value = fit.dof > 0 ? boost::math::gamma_q(0.5 * fit.dof, 0.5 * chi) : 1.0;
    return fit;
}

}  // namespace crackle
