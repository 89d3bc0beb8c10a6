#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crackle/geometry.hpp"
#include "crackle/points.hpp"

namespace crackle {

struct BettiVector {
    std::vector<long> betti;
    long operator[](std::size_t p) const { return p < betti.size() ? betti[p] : 0; }
};

// beta_p = S_p - rank d_p - rank d_{p+1} over GF(2), p = 0..max_dim.
BettiVector betti_numbers(const SimplicialComplex& complex, int max_dim);

long euler_characteristic(const SimplicialComplex& complex);

// Undirected graph on at most 8 vertices, adjacency as bit masks.
struct SmallGraph {
    int n = 0;
    std::array<std::uint8_t, 8> adj{};

    static SmallGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges);
    static SmallGraph path(int n);
    static SmallGraph cycle(int n);
    static SmallGraph star(int leaves);
    static SmallGraph complete(int n);
    bool has_edge(int a, int b) const { return (adj[a] >> b) & 1u; }
    int degree(int v) const { return __builtin_popcount(adj[v]); }
    int num_edges() const;
    bool connected() const;
    std::vector<std::pair<int, int>> edges() const;
};

bool graph_isomorphic(const SmallGraph& g1, const SmallGraph& g2);

// Geometric graph of a small point set at radius r.
SmallGraph small_geometric_graph(const Points& points, double r);

enum class ConstraintKind { GammaIso, BettiCycle, Connected };

const char* constraint_name(ConstraintKind k);

struct Constraint {
    ConstraintKind kind = ConstraintKind::Connected;
    int k = 2;
    SmallGraph target;  // GammaIso only

    static Constraint connected(int k);
    static Constraint betti_cycle(int k);
    static Constraint gamma_iso(const SmallGraph& g);
};

// Proximity bound at unit scale: h(0, y) = 0 once some |y_i| > M.
double proximity_bound(const Constraint& c);

// h(points / r) for the given constraint; translation and permutation invariant.
int evaluate_h(const Constraint& c, const Points& points, double r);

// 1 iff the Cech complex (equivalently the geometric graph) at r is connected.
int evaluate_h_tilde(const Points& points, double r);

}  // namespace crackle
