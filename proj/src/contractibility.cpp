#include "crackle/contractibility.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "crackle/errors.hpp"

namespace crackle {

namespace {

void require_1d(const RadialDensity& density) {
    if (density.dim() != 1) throw UnsupportedError("the covering simulation is implemented for d = 1");
    if (density.family() == Family::HeavyPolynomial)
        throw ParameterError("the covering event needs a light-tailed density");
}

// Sorted points in [a, b] (0 <= a < b) on the positive half line.
std::vector<double> sample_window(Rng& rng, double n, const RadialDensity& f, double a, double b) {
    double sa = f.radial_sf(a), sb = f.radial_sf(b);
    std::uint64_t m = rng.poisson(0.5 * n * (sa - sb));
    std::vector<double> xs(m);
    for (auto& x : xs) x = std::clamp(f.radial_sf_quantile(sb + (sa - sb) * rng.uniform_open0()), a, b);
    std::sort(xs.begin(), xs.end());
    return xs;
}

bool chain_covers(const std::vector<double>& xs, double lo, double hi, double r) {
    if (xs.empty() || xs.front() > lo + r || xs.back() < hi - r) return false;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] - xs[i - 1] > 2.0 * r) return false;
    return true;
}

double window_start(const ContractibilityPlan& p) { return std::max(0.0, p.a - p.radii.r_n); }

}  // namespace

ContractibilityPlan contractibility_plan(double n, const RadialDensity& density, const RnRule& rule,
                                         double delta, double g, double eps_target) {
    require_1d(density);
    ContractibilityPlan p;
    p.radii = contractibility_radii(n, density, rule, delta, g);
    const double r = p.radii.r_n, R0 = p.radii.R0;
    double eps = 0.0;
    int m = 0;
    while ((m + 1) * r <= R0) {
        double term = 2.0 * std::exp(-n * interval_mass_1d(m * r, (m + 1) * r, density));
        if (eps + term > eps_target) break;
        eps += term;
        ++m;
    }
    p.a = m * r;
    p.eps_bound = eps;
    p.window_mean = 0.5 * n * (density.radial_sf(window_start(p)) - density.radial_sf(R0));
    return p;
}

ContractibilityOutcome contractibility_event(const ContractibilityPlan& plan, const RadialDensity& density,
                                             std::uint64_t seed) {
    require_1d(density);
    Rng rng(seed);
    const double r = plan.radii.r_n, R0 = plan.radii.R0, n = plan.radii.n;
    ContractibilityOutcome o;
    const double lo = window_start(plan);
    auto right = sample_window(rng, n, density, lo, R0);
    auto left = sample_window(rng, n, density, lo, R0);
    if (plan.a == 0.0) {
        std::vector<double> all;
        for (auto it = left.rbegin(); it != left.rend(); ++it) all.push_back(-*it);
        all.insert(all.end(), right.begin(), right.end());
        o.covered = chain_covers(all, -R0, R0, r);
    } else {
        // The last core tile [a - r, a] must hold a point; the tiles below it
        // are occupied except on an event of probability <= eps_bound.
        o.covered = chain_covers(right, lo, R0, r) && chain_covers(left, lo, R0, r);
    }
    o.empty_beyond = rng.poisson(n * density.radial_sf(plan.radii.R1)) == 0;
    return o;
}

ContractibilityEstimate estimate_contractibility(double n, const RadialDensity& density,
                                                 const RnRule& rule, double delta, double g,
                                                 int trials, std::uint64_t seed) {
    if (trials < 1) throw ParameterError("trials must be >= 1");
    ContractibilityEstimate e;
    e.plan = contractibility_plan(n, density, rule, delta, g);
    e.trials = trials;
    std::vector<ContractibilityOutcome> out(trials);
#pragma omp parallel for schedule(dynamic, 64)
    for (int i = 0; i < trials; ++i)
        out[i] = contractibility_event(e.plan, density, derive_seed(seed, static_cast<std::uint64_t>(i)));
    long cov = 0, emp = 0, joint = 0;
    for (const auto& o : out) {
        cov += o.covered;
        emp += o.empty_beyond;
        joint += o.joint();
    }
    const double T = trials;
    e.covered = cov / T;
    e.empty_beyond = emp / T;
    e.joint = joint / T;
    e.joint_stderr = std::sqrt(e.joint * (1.0 - e.joint) / T);
    return e;
}

namespace reference {

ContractibilityOutcome contractibility_event_full(double n, const RadialDensity& density,
                                                  const ContractibilityRadii& radii, std::uint64_t seed) {
    require_1d(density);
    PointCloud cl = sample_cloud(n, density, seed);
    std::vector<double> inside;
    ContractibilityOutcome o;
    o.empty_beyond = true;
    for (std::size_t i = 0; i < cl.size(); ++i) {
        double x = cl.points[i][0];
        if (std::fabs(x) <= radii.R0) inside.push_back(x);
        if (std::fabs(x) > radii.R1) o.empty_beyond = false;
    }
    std::sort(inside.begin(), inside.end());
    o.covered = chain_covers(inside, -radii.R0, radii.R0, radii.r_n);
    return o;
}

}  // namespace reference

}  // namespace crackle
