#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "crackle/rng.hpp"
#include "crackle/stats.hpp"

using namespace crackle;

namespace {
std::vector<long> poisson_draws(double lambda, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<long> v(n);
    for (auto& x : v) x = static_cast<long>(rng.poisson(lambda));
    return v;
}
}  // namespace

TEST_CASE("moments") {
    std::vector<double> x{1, 2, 3, 4};
    CHECK(sample_mean(x) == 2.5);
    CHECK(sample_variance(x) == doctest::Approx(5.0 / 3.0));
    CHECK(to_doubles({1, 2}) == std::vector<double>{1.0, 2.0});
    double s = 0;
    for (int k = 0; k < 60; ++k) s += poisson_pmf(k, 3.5);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(poisson_pmf(0, 0.0) == 1.0);
    CHECK(poisson_pmf(2, 0.0) == 0.0);
}

TEST_CASE("poisson sampler") {
    for (double lam : {0.3, 4.0, 80.0, 5000.0}) {
        auto v = poisson_draws(lam, 20000, 17);
        auto d = to_doubles(v);
        CHECK(std::fabs(sample_mean(d) - lam) < 4 * std::sqrt(lam / 20000));
        CHECK(sample_variance(d) == doctest::Approx(lam).epsilon(0.05));
    }
}

TEST_CASE("kolmogorov smirnov") {
    auto U = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CHECK(ks_one_sample({0.5}, U) == doctest::Approx(0.5));
    CHECK(ks_one_sample({0.25, 0.75}, U) == doctest::Approx(0.25));
    Rng rng(3);
    std::vector<double> u(20000);
    for (auto& v : u) v = rng.uniform();
    CHECK(ks_one_sample(u, U) < 1.36 / std::sqrt(20000.0) * 1.5);

    CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(ks_two_sample({1, 2, 3}, {4, 5}) == 1.0);
    // ties across samples are handled jointly
    CHECK(ks_two_sample({1, 1, 2}, {1, 2, 2}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("hill estimator") {
    Rng rng(12);
    std::vector<double> x(100000);
    for (auto& v : x) v = std::pow(rng.uniform_open0(), -1.0 / 1.7) * (rng.sign());
    CHECK(hill_tail_index(x, 2000) == doctest::Approx(1.7).epsilon(0.08));
}

TEST_CASE("poisson goodness of fit") {
    auto zeros = std::vector<long>(100, 0);
    auto z = poisson_gof(zeros, 0.0);
    CHECK(z.tv_distance == 0.0);
    CHECK(z.p_value == 1.0);

    int accepted = 0;
    for (int m = 0; m < 100; ++m)
        accepted += poisson_gof(poisson_draws(0.7, 10000, 1000 + m), 0.7).p_value > 0.01;
    CHECK(accepted >= 95);

    auto v = poisson_draws(0.7, 10000, 5);
    auto bad = poisson_gof(v, 2.0);
    CHECK(bad.tv_distance > 0.3);
    CHECK(bad.p_value < 0.01);
    // scipy: TV(Poi(0.7), Poi(2)) = 0.43819
    CHECK(tv_to_poisson(poisson_draws(0.7, 200000, 6), 2.0) == doctest::Approx(0.43819).epsilon(0.02));
    CHECK(tv_to_poisson({0, 0, 0, 0}, 0.0) == 0.0);
    CHECK(tv_to_poisson({0, 0}, 1.0) == doctest::Approx(1 - std::exp(-1.0)));

    auto fit = poisson_gof(v, 0.7);
    CHECK(fit.bins >= 3);
    CHECK(fit.dof == fit.bins - 1);
    CHECK(poisson_gof(v, 0.7, 1).dof == fit.bins - 2);
}
