#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "crackle/geometry.hpp"
#include "crackle/rng.hpp"

using namespace crackle;

namespace {

Points line(std::initializer_list<double> xs) {
    Points p(1);
    for (double x : xs) p.push_back({x});
    return p;
}

Points random_points(Rng& rng, int n, int d, double side) {
    Points p(d);
    std::vector<double> x(d);
    for (int i = 0; i < n; ++i) {
        for (auto& v : x) v = rng.uniform(0.0, side);
        p.push_back(x.data());
    }
    return p;
}

// Exhaustive enclosing-ball oracle: the smallest ball is the circumball of
// some subset of at most d+1 points (2D only here).
double meb_oracle_2d(const Points& p) {
    const int n = static_cast<int>(p.size());
    double best = INFINITY;
    auto covers = [&](double cx, double cy, double r) {
        for (int i = 0; i < n; ++i)
            if (std::hypot(p[i][0] - cx, p[i][1] - cy) > r * (1 + 1e-12) + 1e-15) return false;
        return true;
    };
    if (n == 1) return 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double cx = 0.5 * (p[i][0] + p[j][0]), cy = 0.5 * (p[i][1] + p[j][1]);
            double r = 0.5 * std::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]);
            if (covers(cx, cy, r)) best = std::min(best, r);
            for (int k = j + 1; k < n; ++k) {
                double ax = p[i][0], ay = p[i][1], bx = p[j][0], by = p[j][1], qx = p[k][0], qy = p[k][1];
                double D = 2 * (ax * (by - qy) + bx * (qy - ay) + qx * (ay - by));
                if (std::fabs(D) < 1e-14) continue;
                double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, q2 = qx * qx + qy * qy;
                double ux = (a2 * (by - qy) + b2 * (qy - ay) + q2 * (ay - by)) / D;
                double uy = (a2 * (qx - bx) + b2 * (ax - qx) + q2 * (bx - ax)) / D;
                double r3 = std::hypot(ax - ux, ay - uy);
                if (covers(ux, uy, r3)) best = std::min(best, r3);
            }
        }
    return best;
}

}  // namespace

TEST_CASE("closed threshold graph") {
    auto g = build_geometric_graph(line({0.0, 0.5}), 1.0);
    CHECK(g.edges.size() == 1);
    auto tie = build_geometric_graph(line({0.0, 1.0}), 1.0);
    CHECK(tie.edges.size() == 1);
    CHECK(tie.component_labels == std::vector<int>{0, 0});
    CHECK(build_geometric_graph(line({0.0, 1.0000001}), 1.0).edges.empty());
}

TEST_CASE("grid graph equals brute force") {
    Rng rng(123);
    for (int t = 0; t < 50; ++t) {
        int d = 1 + t % 3;
        auto p = random_points(rng, 100, d, 10.0);
        double r = 0.3 + 0.1 * (t % 8);
        auto fast = build_geometric_graph(p, r);
        auto slow = reference::brute_force_graph(p, r);
        CHECK(fast.edges == slow.edges);
        CHECK(fast.component_labels == slow.component_labels);
        CHECK(component_labels(p, r) == slow.component_labels);
    }
    // coordinates far from the origin
    Points far(2);
    for (int i = 0; i < 30; ++i) far.push_back({1e6 + 0.4 * i, -1e6 + 0.1 * (i % 3)});
    CHECK(build_geometric_graph(far, 0.5).edges == reference::brute_force_graph(far, 0.5).edges);
}

TEST_CASE("isolated components of a given size") {
    CHECK(isolated_components_of_size(Points(1), 1.0, 2).empty());
    auto p = line({0.0, 0.4, 5.0, 5.3, 5.6});
    CHECK(isolated_components_of_size(p, 1.0, 2) == std::vector<std::vector<int>>{{0, 1}});
    CHECK(isolated_components_of_size(p, 1.0, 3) == std::vector<std::vector<int>>{{2, 3, 4}});
    CHECK(connected_components(p, 1.0).size() == 2);
}

TEST_CASE("components beyond a radius") {
    auto p = line({0.0, 0.1, 10.0, 10.5, -7.0, -3.4, -4.2});
    auto c = components_beyond(p, 1.0, 5.0);
    // {10, 10.5} and {-7}; the chain -3.4, -4.2 touches the inner region
    REQUIRE(c.size() == 2);
    CHECK(c[0] == std::vector<int>{2, 3});
    CHECK(c[1] == std::vector<int>{4});
    // -4.2 is inside R = 4.5 and within r of nothing beyond; -7 alone
    auto c2 = components_beyond(line({-4.2, -5.1, -7.0}), 1.0, 4.5);
    REQUIRE(c2.size() == 1);
    CHECK(c2[0] == std::vector<int>{2});
}

TEST_CASE("minimum enclosing ball") {
    Points one(2);
    one.push_back({3.0, 4.0});
    CHECK(min_enclosing_ball(one).radius == 0.0);

    Points two(2);
    two.push_back({0.0, 0.0});
    two.push_back({1.0, 0.0});
    auto b = min_enclosing_ball(two);
    CHECK(b.radius == doctest::Approx(0.5));
    CHECK(b.center[0] == doctest::Approx(0.5));

    Points tri(2);
    tri.push_back({0.0, 0.0});
    tri.push_back({1.0, 0.0});
    tri.push_back({0.5, std::sqrt(3.0) / 2});
    CHECK(min_enclosing_ball(tri).radius == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-12));

    // duplicates and collinear points
    Points dup(2);
    for (int i = 0; i < 4; ++i) dup.push_back({1.0, 1.0});
    dup.push_back({2.0, 1.0});
    dup.push_back({1.5, 1.0});
    CHECK(min_enclosing_ball(dup).radius == doctest::Approx(0.5).epsilon(1e-12));

    // regular simplex in R^3: circumradius sqrt(3/8)
    Points tet(3);
    tet.push_back({1.0, 0.0, -1 / std::sqrt(2.0)});
    tet.push_back({-1.0, 0.0, -1 / std::sqrt(2.0)});
    tet.push_back({0.0, 1.0, 1 / std::sqrt(2.0)});
    tet.push_back({0.0, -1.0, 1 / std::sqrt(2.0)});
    CHECK(min_enclosing_ball(tet).radius == doctest::Approx(2 * std::sqrt(3.0 / 8.0)).epsilon(1e-12));
}

TEST_CASE("enclosing ball against the exhaustive oracle") {
    Rng rng(2024);
    for (int t = 0; t < 300; ++t) {
        int n = 1 + static_cast<int>(rng.below(6));
        auto p = random_points(rng, n, 2, 3.0);
        auto b = min_enclosing_ball(p);
        CHECK(std::fabs(b.radius - meb_oracle_2d(p)) <= 1e-9);
        for (std::size_t i = 0; i < p.size(); ++i)
            CHECK(std::sqrt(dist2(p[i], b.center.data(), 2)) <= b.radius * (1 + 1e-9) + 1e-12);
    }
}

TEST_CASE("cech complex of a triangle") {
    Points tri(2);
    tri.push_back({0.0, 0.0});
    tri.push_back({1.0, 0.0});
    tri.push_back({0.5, std::sqrt(3.0) / 2});
    auto k = cech_complex(tri, 1.0, 2);
    CHECK(k.count(0) == 3);
    CHECK(k.count(1) == 3);
    CHECK(k.count(2) == 0);
    CHECK(cech_complex(tri, 1.2, 2).count(2) == 1);

    Points one(3);
    one.push_back({1.0, 2.0, 3.0});
    auto s = cech_complex(one, 1.0, 3);
    CHECK(s.count(0) == 1);
    CHECK(s.count(1) == 0);
}

TEST_CASE("cech complex is closed under faces") {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        auto p = random_points(rng, 15, 2, 2.0);
        auto k = cech_complex(p, 0.8, 3);
        for (int dim = 1; dim <= k.max_dim(); ++dim)
            for (const auto& s : k.simplices_by_dim[dim])
                for (std::size_t drop = 0; drop < s.size(); ++drop) {
                    auto f = s;
                    f.erase(f.begin() + drop);
                    CHECK(std::binary_search(k.simplices_by_dim[dim - 1].begin(), k.simplices_by_dim[dim - 1].end(), f));
                }
    }
}
