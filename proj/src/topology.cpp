#include "crackle/topology.hpp"

#include <algorithm>
#include <map>

#include "crackle/errors.hpp"

namespace crackle {

namespace {

using Column = std::vector<std::uint64_t>;

int lowest_bit(const Column& c) {
    for (std::size_t w = c.size(); w-- > 0;)
        if (c[w]) return static_cast<int>(w * 64 + 63 - __builtin_clzll(c[w]));
    return -1;
}

// Rank over GF(2) of the boundary map from p-simplices to (p-1)-simplices.
std::size_t boundary_rank(const std::vector<std::vector<int>>& faces,
                          const std::vector<std::vector<int>>& simplices, int p) {
    if (simplices.empty() || faces.empty()) return 0;
    const std::size_t words = (faces.size() + 63) / 64;
    std::vector<int> pivot_owner(faces.size(), -1);
    std::vector<Column> reduced;
    reduced.reserve(simplices.size());
    std::size_t rank = 0;
    std::vector<int> face(p);
    for (const auto& s : simplices) {
        Column col(words, 0);
        for (int drop = 0; drop <= p; ++drop) {
            int w = 0;
            for (int j = 0; j <= p; ++j)
                if (j != drop) face[w++] = s[j];
            auto it = std::lower_bound(faces.begin(), faces.end(), face);
            if (it == faces.end() || *it != face)
                throw StructuralError("complex is not downward closed");
            std::size_t idx = static_cast<std::size_t>(it - faces.begin());
            col[idx / 64] ^= std::uint64_t(1) << (idx % 64);
        }
        int low = lowest_bit(col);
        while (low >= 0 && pivot_owner[low] >= 0) {
            const Column& other = reduced[pivot_owner[low]];
            for (std::size_t w = 0; w < words; ++w) col[w] ^= other[w];
            low = lowest_bit(col);
        }
        if (low >= 0) {
            pivot_owner[low] = static_cast<int>(reduced.size());
            reduced.push_back(std::move(col));
            ++rank;
        }
    }
    return rank;
}

}  // namespace

BettiVector betti_numbers(const SimplicialComplex& complex, int max_dim) {
    if (max_dim < 0) throw ParameterError("max_dim must be >= 0");
    BettiVector b;
    b.betti.assign(max_dim + 1, 0);
    std::vector<std::size_t> rank(max_dim + 2, 0);
    for (int p = 1; p <= max_dim && p <= complex.max_dim(); ++p)
        rank[p] = boundary_rank(complex.simplices_by_dim[p - 1], complex.simplices_by_dim[p], p);
    for (int p = 0; p <= max_dim; ++p) {
        long s = static_cast<long>(complex.count(p));
        b.betti[p] = s - static_cast<long>(rank[p]) - (p + 1 <= max_dim ? static_cast<long>(rank[p + 1]) : 0);
    }
    return b;
}

long euler_characteristic(const SimplicialComplex& complex) {
    long chi = 0;
    for (int p = 0; p <= complex.max_dim(); ++p)
        chi += (p % 2 == 0 ? 1 : -1) * static_cast<long>(complex.count(p));
    return chi;
}

SmallGraph SmallGraph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n < 0 || n > 8) throw ParameterError("small graphs have at most 8 vertices");
    SmallGraph g;
    g.n = n;
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw ParameterError("bad edge in small graph");
        g.adj[a] |= static_cast<std::uint8_t>(1u << b);
        g.adj[b] |= static_cast<std::uint8_t>(1u << a);
    }
    return g;
}

SmallGraph SmallGraph::path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return from_edges(n, e);
}

SmallGraph SmallGraph::cycle(int n) {
    auto g = path(n);
    if (n >= 3) {
        g.adj[0] |= static_cast<std::uint8_t>(1u << (n - 1));
        g.adj[n - 1] |= 1u;
    }
    return g;
}

SmallGraph SmallGraph::star(int leaves) {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
    return from_edges(leaves + 1, e);
}

SmallGraph SmallGraph::complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return from_edges(n, e);
}

int SmallGraph::num_edges() const {
    int s = 0;
    for (int v = 0; v < n; ++v) s += degree(v);
    return s / 2;
}

bool SmallGraph::connected() const {
    if (n == 0) return true;
    unsigned seen = 1u, frontier = 1u;
    while (frontier) {
        unsigned next = 0;
        for (int v = 0; v < n; ++v)
            if ((frontier >> v) & 1u) next |= adj[v];
        frontier = next & ~seen;
        seen |= next;
    }
    return seen == (1u << n) - 1u;
}

std::vector<std::pair<int, int>> SmallGraph::edges() const {
    std::vector<std::pair<int, int>> e;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (has_edge(a, b)) e.emplace_back(a, b);
    return e;
}

namespace {

bool extend(const SmallGraph& g1, const SmallGraph& g2, std::array<int, 8>& map, unsigned used, int v) {
    if (v == g1.n) return true;
    for (int w = 0; w < g2.n; ++w) {
        if ((used >> w) & 1u) continue;
        if (g1.degree(v) != g2.degree(w)) continue;
        bool ok = true;
        for (int u = 0; u < v && ok; ++u) ok = g1.has_edge(u, v) == g2.has_edge(map[u], w);
        if (!ok) continue;
        map[v] = w;
        if (extend(g1, g2, map, used | (1u << w), v + 1)) return true;
    }
    return false;
}

}  // namespace

bool graph_isomorphic(const SmallGraph& g1, const SmallGraph& g2) {
    if (g1.n > 8 || g2.n > 8) throw ParameterError("graph_isomorphic supports at most 8 vertices");
    if (g1.n != g2.n || g1.num_edges() != g2.num_edges()) return false;
    std::vector<int> d1, d2;
    for (int v = 0; v < g1.n; ++v) {
        d1.push_back(g1.degree(v));
        d2.push_back(g2.degree(v));
    }
    std::sort(d1.begin(), d1.end());
    std::sort(d2.begin(), d2.end());
    if (d1 != d2) return false;
    std::array<int, 8> map{};
    return extend(g1, g2, map, 0u, 0);
}

SmallGraph small_geometric_graph(const Points& points, double r) {
    const int n = static_cast<int>(points.size());
    if (n > 8) throw ParameterError("small_geometric_graph supports at most 8 points");
    SmallGraph g;
    g.n = n;
    const double r2 = r * r;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (dist2(points[a], points[b], points.dim) <= r2) {
                g.adj[a] |= static_cast<std::uint8_t>(1u << b);
                g.adj[b] |= static_cast<std::uint8_t>(1u << a);
            }
    return g;
}

const char* constraint_name(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::GammaIso: return "GammaIso";
        case ConstraintKind::BettiCycle: return "BettiCycle";
        case ConstraintKind::Connected: return "Connected";
    }
    return "unknown";
}

Constraint Constraint::connected(int k) {
    if (k < 1 || k > 8) throw ParameterError("tuple size must be in 1..8");
    Constraint c;
    c.kind = ConstraintKind::Connected;
    c.k = k;
    return c;
}

Constraint Constraint::betti_cycle(int k) {
    if (k < 2 || k > 8) throw ParameterError("BettiCycle tuple size must be in 2..8");
    Constraint c;
    c.kind = ConstraintKind::BettiCycle;
    c.k = k;
    return c;
}

Constraint Constraint::gamma_iso(const SmallGraph& g) {
    if (g.n < 1) throw ParameterError("target graph is empty");
    if (!g.connected()) throw ParameterError("target graph must be connected");
    Constraint c;
    c.kind = ConstraintKind::GammaIso;
    c.k = g.n;
    c.target = g;
    return c;
}

double proximity_bound(const Constraint& c) { return static_cast<double>(c.k - 1); }

int evaluate_h(const Constraint& c, const Points& points, double r) {
    if (static_cast<int>(points.size()) != c.k)
        throw ParameterError("tuple size does not match the constraint");
    if (!(r > 0.0)) throw ParameterError("scale must be positive");
    SmallGraph g = small_geometric_graph(points, r);
    switch (c.kind) {
        case ConstraintKind::Connected: return g.connected() ? 1 : 0;
        case ConstraintKind::GammaIso: return graph_isomorphic(g, c.target) ? 1 : 0;
        case ConstraintKind::BettiCycle: {
            if (!g.connected()) return 0;
            SimplicialComplex K = cech_complex(points, r, c.k - 1);
            return betti_numbers(K, c.k - 1)[c.k - 2] == 1 ? 1 : 0;
        }
    }
    return 0;
}

int evaluate_h_tilde(const Points& points, double r) {
    if (points.size() > 8) {
        auto comps = connected_components(points, r);
        return comps.size() == 1 ? 1 : 0;
    }
    return small_geometric_graph(points, r).connected() ? 1 : 0;
}

}  // namespace crackle
