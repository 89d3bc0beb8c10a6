#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "crackle/points.hpp"

namespace crackle {

class UnionFind {
public:
    explicit UnionFind(std::size_t n = 0) { reset(n); }
    void reset(std::size_t n);
    int find(int x);
    bool unite(int a, int b);
    bool same(int a, int b) { return find(a) == find(b); }
    std::size_t size() const { return parent_.size(); }

private:
    std::vector<int> parent_;
    std::vector<int> rank_;
};

struct GeometricGraph {
    std::size_t num_vertices = 0;
    std::vector<std::pair<int, int>> edges;  // i < j, sorted
    double radius = 0.0;
    std::vector<int> component_labels;       // smallest vertex id of the component
};

// Closed threshold |x_i - x_j| <= r; uniform grid with cell side r.
GeometricGraph build_geometric_graph(const Points& points, double r);

// Component labels of G(points, r) without materialising edges.
// Label of a vertex is the smallest vertex id in its component.
std::vector<int> component_labels(const Points& points, double r);

// Components of G(points, r) grouped as sorted index lists, ordered by first index.
std::vector<std::vector<int>> connected_components(const Points& points, double r);

// Connected components of cardinality exactly k.
std::vector<std::vector<int>> isolated_components_of_size(const Points& points, double r, int k);

// Components of G(points, r) made entirely of points with norm >= R.
// Only points with norm >= R - r are inspected; indices refer to `points`.
std::vector<std::vector<int>> components_beyond(const Points& points, double r, double R);

struct Ball {
    std::vector<double> center;
    double radius = 0.0;
};

// Smallest enclosing ball (move-to-front Welzl, duplicates removed first).
Ball min_enclosing_ball(const Points& points);

struct SimplicialComplex {
    // simplices_by_dim[p] holds sorted (p+1)-tuples of vertex ids, lexicographically sorted.
    std::vector<std::vector<std::vector<int>>> simplices_by_dim;
    int max_dim() const { return static_cast<int>(simplices_by_dim.size()) - 1; }
    std::size_t count(int p) const {
        return p >= 0 && p <= max_dim() ? simplices_by_dim[p].size() : 0;
    }
};

// Cech complex: a simplex is present iff the smallest ball enclosing its vertices has
// radius <= r/2. Built by expanding cliques of G(points, r) up to max_dim.
SimplicialComplex cech_complex(const Points& points, double r, int max_dim);

namespace reference {
// O(n^2) pair scan.
GeometricGraph brute_force_graph(const Points& points, double r);
}  // namespace reference

}  // namespace crackle
