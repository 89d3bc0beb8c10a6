#include <doctest.h>

#include <cmath>
#include <numbers>

#include "crackle/distributions.hpp"
#include "crackle/errors.hpp"
#include "crackle/stats.hpp"

using namespace crackle;
using std::numbers::pi;

TEST_CASE("sphere surface areas") {
    CHECK(sphere_surface_area(1) == doctest::Approx(2.0));
    CHECK(sphere_surface_area(2) == doctest::Approx(2 * pi));
    CHECK(sphere_surface_area(3) == doctest::Approx(4 * pi));
    CHECK(unit_ball_volume(2) == doctest::Approx(pi));
}

TEST_CASE("normalizing constants") {
    // 1 / (2 int_0^inf dr / (1 + r^3)), mpmath quadrature
    CHECK(normalizing_constant(Family::HeavyPolynomial, 3.0, 1) == doctest::Approx(0.413496671566344).epsilon(1e-10));
    CHECK(normalizing_constant(Family::HeavyPolynomial, 2.0, 1) == doctest::Approx(1.0 / pi).epsilon(1e-10));
    CHECK(normalizing_constant(Family::LightVonMises, 1.0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(normalizing_constant(Family::LightVonMises, 2.0, 2) == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-12));
    CHECK(normalizing_constant(Family::LightVonMises, 2.0, 1) == doctest::Approx(1.0 / std::sqrt(2 * pi)).epsilon(1e-12));
    // 3 sqrt(3) / (4 pi^2): int_0^inf r / (1 + r^3) dr = 2 pi / (3 sqrt 3)
    CHECK(normalizing_constant(Family::HeavyPolynomial, 3.0, 2) ==
          doctest::Approx(3 * std::sqrt(3.0) / (4 * pi * pi)).epsilon(1e-9));
}

TEST_CASE("alpha must exceed d") {
    CHECK_THROWS_AS(RadialDensity::heavy(1.0, 1), DomainError);
    CHECK_THROWS_AS(RadialDensity::heavy(1.5, 2), DomainError);
    CHECK_THROWS_AS(RadialDensity::light(0.0, 1), Error);
}

TEST_CASE("radial quantiles") {
    auto h = RadialDensity::heavy(3.0, 1);
    CHECK(h.radial_quantile(0.0) == 0.0);
    CHECK(h.radial_quantile(0.5) == doctest::Approx(0.641542158831534).epsilon(1e-9));
    auto l = RadialDensity::light(1.0, 1);
    CHECK(l.radial_quantile(1 - std::exp(-2.0)) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(l.radial_sf_quantile(std::exp(-30.0)) == doctest::Approx(30.0).epsilon(1e-10));

    // quantile inverts the cdf
    for (auto f : {RadialDensity::heavy(2.5, 2), RadialDensity::light(0.5, 3), RadialDensity::light(2.0, 2)})
        for (double u : {1e-6, 0.1, 0.5, 0.9, 0.999999}) {
            double r = f.radial_quantile(u);
            CHECK(f.radial_cdf(r) == doctest::Approx(u).epsilon(1e-9));
            double q = 1 - u;
            CHECK(f.radial_sf(f.radial_sf_quantile(q)) == doctest::Approx(q).epsilon(1e-9));
        }
}

TEST_CASE("radial pdf integrates to the cdf") {
    auto f = RadialDensity::heavy(3.0, 2);
    // trapezoid on [0, 3]
    int m = 30000;
    double s = 0.0, h = 3.0 / m;
    for (int i = 0; i <= m; ++i) s += (i == 0 || i == m ? 0.5 : 1.0) * f.radial_pdf(i * h);
    CHECK(s * h == doctest::Approx(f.radial_cdf(3.0)).epsilon(1e-7));
    CHECK(f.radial_pdf(1.5) == doctest::Approx(sphere_surface_area(2) * 1.5 * f.profile(1.5)).epsilon(1e-12));
}

TEST_CASE("pluggable psi matches the light family") {
    PsiFunctions p;
    p.name = "gauss";
    p.psi = [](double z) { return 0.5 * z * z; };
    p.dpsi = [](double z) { return z; };
    p.inverse = [](double y) { return std::sqrt(2 * y); };
    auto g = RadialDensity::pluggable(p, 1);
    auto l = RadialDensity::light(2.0, 1);
    CHECK(g.scale_C() == doctest::Approx(l.scale_C()).epsilon(1e-8));
    for (double r : {0.3, 1.0, 2.5, 4.0}) CHECK(g.radial_sf(r) == doctest::Approx(l.radial_sf(r)).epsilon(1e-6));
    CHECK(g.a(4.0) == doctest::Approx(0.25));
}

TEST_CASE("sample_cloud basics") {
    auto f = RadialDensity::heavy(2.0, 1);
    CHECK(sample_cloud(0.0, f, 3).size() == 0);
    // same seed, same cloud
    auto a = sample_cloud(1000, f, 42), b = sample_cloud(1000, f, 42);
    CHECK(a.points.coords == b.points.coords);

    std::vector<double> sizes;
    for (int i = 0; i < 200; ++i) sizes.push_back(static_cast<double>(sample_cloud(1e4, f, 1000 + i).size()));
    CHECK(std::fabs(sample_mean(sizes) - 1e4) < 3 * std::sqrt(1e4 / 200));
}

TEST_CASE("heavy tail of sampled norms") {
    auto f = RadialDensity::heavy(2.0, 1);
    // P(|X| > t) t^{alpha-d} -> 2C/(alpha-d) = 2/pi
    std::vector<double> norms;
    for (int rep = 0; rep < 20; ++rep) {
        auto c = sample_cloud(1e5, f, 77 + rep);
        for (std::size_t i = 0; i < c.size(); ++i) norms.push_back(c.points.norm(i));
    }
    for (double t : {10.0, 20.0, 40.0}) {
        double cnt = 0;
        for (double x : norms) cnt += x > t;
        double p = cnt / norms.size();
        double exact = f.radial_sf(t);
        CHECK(std::fabs(p - exact) < 4 * std::sqrt(exact / norms.size()));
        CHECK(p * t == doctest::Approx(2.0 / pi).epsilon(0.1));
    }
}

TEST_CASE("restricted sampler keeps the outer shell law") {
    auto f = RadialDensity::light(1.0, 2);
    std::vector<double> full, outer;
    double R = 4.0;
    for (int rep = 0; rep < 300; ++rep) {
        auto a = sample_cloud(2000, f, 10 + rep);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.points.norm(i) >= R) full.push_back(a.points.norm(i));
        auto b = sample_cloud_beyond(2000, f, R, 5000 + rep);
        CHECK(b.cutoff == R);
        for (std::size_t i = 0; i < b.size(); ++i) {
            CHECK(b.points.norm(i) >= R);
            outer.push_back(b.points.norm(i));
        }
    }
    double expect = 300 * 2000 * f.radial_sf(R);
    CHECK(std::fabs(outer.size() - expect) < 4 * std::sqrt(expect));
    CHECK(ks_two_sample(full, outer) < 0.05);
}

TEST_CASE("union of balls") {
    auto f = RadialDensity::light(1.0, 1);
    Points c(1);
    c.push_back({0.0});
    auto e = union_of_balls_probability(c, 1.0, f, 200000, 9);
    CHECK(std::fabs(e.estimate - (1 - std::exp(-1.0))) < 3 * e.stderr_ + 1e-12);
    CHECK(union_of_balls_mass_1d({0.0}, 1.0, f) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-12));

    // disjoint balls add up
    Points two(1);
    two.push_back({-3.0});
    two.push_back({3.0});
    double single = interval_mass_1d(2.0, 4.0, f);
    auto u = union_of_balls_probability(two, 1.0, f, 200000, 10);
    CHECK(std::fabs(u.estimate - 2 * single) < 3 * u.stderr_ + 1e-12);
    CHECK(union_of_balls_mass_1d({-3.0, 3.0}, 1.0, f) == doctest::Approx(2 * single).epsilon(1e-12));
    // overlaps are not double counted
    CHECK(union_of_balls_mass_1d({0.0, 0.5}, 1.0, f) == doctest::Approx(interval_mass_1d(-1.0, 1.5, f)).epsilon(1e-12));

    auto tiny = union_of_balls_probability(c, 1e-9, f, 1000, 11);
    CHECK(tiny.estimate < 1e-8);

    // d = 2: ball at the origin has mass F_R(r)
    auto g = RadialDensity::light(2.0, 2);
    Points o(2);
    o.push_back({0.0, 0.0});
    auto e2 = union_of_balls_probability(o, 1.5, g, 200000, 12);
    CHECK(std::fabs(e2.estimate - g.radial_cdf(1.5)) < 3 * e2.stderr_ + 1e-12);
}
