#include "crackle/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <list>
#include <numeric>

#include "crackle/errors.hpp"

namespace crackle {

void UnionFind::reset(std::size_t n) {
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), 0);
    rank_.assign(n, 0);
}

int UnionFind::find(int x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool UnionFind::unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
}

namespace {

constexpr std::int64_t kCellClamp = std::int64_t(1) << 60;

// Points bucketed by integer cell coordinates floor(x / side), cells sorted lexicographically.
class CellGrid {
public:
    CellGrid(const Points& pts, double side) : d_(pts.dim) {
        const std::size_t n = pts.size();
        std::vector<std::int64_t> key(n * d_);
        std::vector<char> clamped(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (int j = 0; j < d_; ++j) {
                double q = std::floor(pts[i][j] / side);
                std::int64_t c;
                if (q >= static_cast<double>(kCellClamp)) {
                    c = kCellClamp;
                    clamped[i] = 1;
                } else if (q <= -static_cast<double>(kCellClamp)) {
                    c = -kCellClamp;
                    clamped[i] = 1;
                } else {
                    c = static_cast<std::int64_t>(q);
                }
                key[i * d_ + j] = c;
            }
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), 0);
        std::sort(order_.begin(), order_.end(), [&](int a, int b) {
            for (int j = 0; j < d_; ++j) {
                if (key[a * d_ + j] != key[b * d_ + j]) return key[a * d_ + j] < key[b * d_ + j];
            }
            return a < b;
        });
        for (std::size_t s = 0; s < n;) {
            std::size_t e = s + 1;
            while (e < n && std::equal(&key[order_[s] * d_], &key[order_[s] * d_] + d_,
                                       &key[order_[e] * d_]))
                ++e;
            start_.push_back(s);
            keys_.insert(keys_.end(), &key[order_[s] * d_], &key[order_[s] * d_] + d_);
            bool any = false;
            for (std::size_t t = s; t < e; ++t) any = any || clamped[order_[t]];
            clamped_.push_back(any);
            s = e;
        }
        start_.push_back(n);
    }

    std::size_t num_cells() const { return clamped_.size(); }
    const std::int64_t* key(std::size_t c) const { return keys_.data() + c * d_; }
    bool clamped(std::size_t c) const { return clamped_[c]; }
    std::size_t begin(std::size_t c) const { return start_[c]; }
    std::size_t end(std::size_t c) const { return start_[c + 1]; }
    int point(std::size_t t) const { return order_[t]; }

    // Index of the cell with the given key, or -1.
    long find(const std::int64_t* k) const {
        std::size_t lo = 0, hi = num_cells();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (std::lexicographical_compare(key(mid), key(mid) + d_, k, k + d_))
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo < num_cells() && std::equal(key(lo), key(lo) + d_, k)) return static_cast<long>(lo);
        return -1;
    }

private:
    int d_;
    std::vector<int> order_;
    std::vector<std::size_t> start_;
    std::vector<std::int64_t> keys_;
    std::vector<char> clamped_;
};

// Offsets in [-m, m]^d that are lexicographically positive.
std::vector<std::vector<std::int64_t>> positive_offsets(int d, int m) {
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> o(d, -m);
    while (true) {
        bool positive = false;
        for (int j = 0; j < d; ++j) {
            if (o[j] != 0) {
                positive = o[j] > 0;
                break;
            }
        }
        if (positive) out.push_back(o);
        int j = d - 1;
        while (j >= 0 && o[j] == m) o[j--] = -m;
        if (j < 0) break;
        ++o[j];
    }
    return out;
}

bool shifted_key(const std::int64_t* k, const std::vector<std::int64_t>& off, std::int64_t* out,
                 int d) {
    for (int j = 0; j < d; ++j) {
        std::int64_t v = k[j] + off[j];
        if (v > kCellClamp || v < -kCellClamp) return false;
        out[j] = v;
    }
    return true;
}

std::vector<int> labels_from(UnionFind& uf, std::size_t n) {
    std::vector<int> root_min(n, -1), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        int r = uf.find(static_cast<int>(i));
        if (root_min[r] < 0) root_min[r] = static_cast<int>(i);
        labels[i] = root_min[r];
    }
    return labels;
}

}  // namespace

GeometricGraph build_geometric_graph(const Points& points, double r) {
    if (!(r > 0.0)) throw ParameterError("graph radius must be positive");
    GeometricGraph g;
    const std::size_t n = points.size();
    const int d = points.dim;
    g.num_vertices = n;
    g.radius = r;
    const double r2 = r * r;
    CellGrid grid(points, r);
    // one cell of slack absorbs rounding in floor(x / r)
    auto offsets = positive_offsets(d, 2);
    std::vector<std::int64_t> nk(d);
    for (std::size_t c = 0; c < grid.num_cells(); ++c) {
        for (std::size_t s = grid.begin(c); s < grid.end(c); ++s)
            for (std::size_t t = s + 1; t < grid.end(c); ++t) {
                int a = grid.point(s), b = grid.point(t);
                if (dist2(points[a], points[b], d) <= r2) g.edges.emplace_back(std::min(a, b), std::max(a, b));
            }
        for (const auto& off : offsets) {
            if (!shifted_key(grid.key(c), off, nk.data(), d)) continue;
            long o = grid.find(nk.data());
            if (o < 0) continue;
            for (std::size_t s = grid.begin(c); s < grid.end(c); ++s)
                for (std::size_t t = grid.begin(o); t < grid.end(o); ++t) {
                    int a = grid.point(s), b = grid.point(t);
                    if (dist2(points[a], points[b], d) <= r2)
                        g.edges.emplace_back(std::min(a, b), std::max(a, b));
                }
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    UnionFind uf(n);
    for (auto [a, b] : g.edges) uf.unite(a, b);
    g.component_labels = labels_from(uf, n);
    return g;
}

std::vector<int> component_labels(const Points& points, double r) {
    if (!(r > 0.0)) throw ParameterError("graph radius must be positive");
    const std::size_t n = points.size();
    const int d = points.dim;
    const double r2 = r * r;
    UnionFind uf(n);
    if (n == 0) return {};
    if (d == 1) {
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return points.coords[a] < points.coords[b] || (points.coords[a] == points.coords[b] && a < b);
        });
        for (std::size_t t = 0; t + 1 < n; ++t) {
            double gap = points.coords[idx[t + 1]] - points.coords[idx[t]];
            if (gap * gap <= r2) uf.unite(idx[t], idx[t + 1]);
        }
        return labels_from(uf, n);
    }
    // Cells of side r/sqrt(d) have diameter r, so each cell is a clique.
    const double side = r / std::sqrt(static_cast<double>(d));
    const int m = static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))) + 2;
    CellGrid grid(points, side);
    auto offsets = positive_offsets(d, m);
    for (std::size_t c = 0; c < grid.num_cells(); ++c) {
        if (!grid.clamped(c)) {
            for (std::size_t s = grid.begin(c) + 1; s < grid.end(c); ++s)
                uf.unite(grid.point(grid.begin(c)), grid.point(s));
        } else {
            for (std::size_t s = grid.begin(c); s < grid.end(c); ++s)
                for (std::size_t t = s + 1; t < grid.end(c); ++t)
                    if (dist2(points[grid.point(s)], points[grid.point(t)], d) <= r2)
                        uf.unite(grid.point(s), grid.point(t));
        }
    }
    std::vector<std::int64_t> nk(d);
    for (std::size_t c = 0; c < grid.num_cells(); ++c) {
        for (const auto& off : offsets) {
            if (!shifted_key(grid.key(c), off, nk.data(), d)) continue;
            long o = grid.find(nk.data());
            if (o < 0) continue;
            bool exhaustive = grid.clamped(c) || grid.clamped(o);
            if (!exhaustive && uf.same(grid.point(grid.begin(c)), grid.point(grid.begin(o)))) continue;
            bool done = false;
            for (std::size_t s = grid.begin(c); s < grid.end(c) && !done; ++s)
                for (std::size_t t = grid.begin(o); t < grid.end(o); ++t) {
                    int a = grid.point(s), b = grid.point(t);
                    if (dist2(points[a], points[b], d) <= r2) {
                        uf.unite(a, b);
                        if (!exhaustive) {
                            done = true;
                            break;
                        }
                    }
                }
        }
    }
    return labels_from(uf, n);
}

std::vector<std::vector<int>> connected_components(const Points& points, double r) {
    auto labels = component_labels(points, r);
    std::vector<std::vector<int>> groups;
    std::vector<int> slot(labels.size(), -1);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        int l = labels[i];
        if (slot[l] < 0) {
            slot[l] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[slot[l]].push_back(static_cast<int>(i));
    }
    return groups;
}

std::vector<std::vector<int>> isolated_components_of_size(const Points& points, double r, int k) {
    if (k < 1) throw ParameterError("component size must be >= 1");
    std::vector<std::vector<int>> out;
    if (points.empty()) return out;
    for (auto& c : connected_components(points, r))
        if (static_cast<int>(c.size()) == k) out.push_back(std::move(c));
    return out;
}

std::vector<std::vector<int>> components_beyond(const Points& points, double r, double R) {
    std::vector<std::vector<int>> out;
    const double thr = R - r;
    std::vector<int> sel;
    std::vector<double> norms;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double nr = points.norm(i);
        // inclusive with a little slack: a superset of the candidates is harmless
        if (thr <= 0.0 || nr >= thr * (1.0 - 1e-12)) {
            sel.push_back(static_cast<int>(i));
            norms.push_back(nr);
        }
    }
    if (sel.empty()) return out;
    Points sub = points.subset(sel);
    for (auto& c : connected_components(sub, r)) {
        bool outside = true;
        for (int v : c) outside = outside && norms[v] >= R;
        if (!outside) continue;
        for (int& v : c) v = sel[v];
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

struct BallState {
    Eigen::VectorXd center;
    double r2 = -1.0;
};

BallState ball_through(const std::vector<const double*>& boundary, int d) {
    BallState b;
    if (boundary.empty()) return b;
    Eigen::Map<const Eigen::VectorXd> p0(boundary[0], d);
    if (boundary.size() == 1) {
        b.center = p0;
        b.r2 = 0.0;
        return b;
    }
    const int m = static_cast<int>(boundary.size()) - 1;
    Eigen::MatrixXd Q(d, m);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
        Q.col(i) = Eigen::Map<const Eigen::VectorXd>(boundary[i + 1], d) - p0;
        rhs(i) = 0.5 * Q.col(i).squaredNorm();
    }
    Eigen::MatrixXd G = Q.transpose() * Q;
    Eigen::VectorXd lambda = G.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd offset = Q * lambda;
    b.center = p0 + offset;
    b.r2 = 0.0;
    for (const double* p : boundary)
        b.r2 = std::max(b.r2, (Eigen::Map<const Eigen::VectorXd>(p, d) - b.center).squaredNorm());
    return b;
}

bool inside(const BallState& b, const double* p, int d) {
    if (b.r2 < 0.0) return false;
    double s = (Eigen::Map<const Eigen::VectorXd>(p, d) - b.center).squaredNorm();
    return s <= b.r2 * (1.0 + 1e-13) + 1e-300;
}

BallState mtf(std::list<const double*>& pts, std::list<const double*>::iterator end,
              std::vector<const double*>& boundary, int d) {
    BallState b = ball_through(boundary, d);
    if (static_cast<int>(boundary.size()) == d + 1) return b;
    for (auto it = pts.begin(); it != end;) {
        auto cur = it++;
        if (!inside(b, *cur, d)) {
            boundary.push_back(*cur);
            b = mtf(pts, cur, boundary, d);
            boundary.pop_back();
            pts.splice(pts.begin(), pts, cur);
        }
    }
    return b;
}

}  // namespace

Ball min_enclosing_ball(const Points& points) {
    if (points.empty()) throw ParameterError("min_enclosing_ball needs at least one point");
    const int d = points.dim;
    std::vector<int> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return std::lexicographical_compare(points[a], points[a] + d, points[b], points[b] + d);
    });
    idx.erase(std::unique(idx.begin(), idx.end(),
                          [&](int a, int b) { return std::equal(points[a], points[a] + d, points[b]); }),
              idx.end());
    std::list<const double*> pts;
    for (int i : idx) pts.push_back(points[i]);
    std::vector<const double*> boundary;
    BallState b = mtf(pts, pts.end(), boundary, d);
    Ball out;
    out.center.assign(b.center.data(), b.center.data() + d);
    out.radius = std::sqrt(std::max(0.0, b.r2));
    return out;
}

SimplicialComplex cech_complex(const Points& points, double r, int max_dim) {
    if (!(r > 0.0)) throw ParameterError("Cech radius must be positive");
    if (max_dim < 0) throw ParameterError("max_dim must be >= 0");
    SimplicialComplex K;
    const std::size_t n = points.size();
    K.simplices_by_dim.resize(max_dim + 1);
    for (std::size_t i = 0; i < n; ++i) K.simplices_by_dim[0].push_back({static_cast<int>(i)});
    if (max_dim == 0 || n == 0) return K;
    GeometricGraph g = build_geometric_graph(points, r);
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (auto [a, b] : g.edges) {
        adj[a][b] = adj[b][a] = 1;
        K.simplices_by_dim[1].push_back({a, b});
    }
    const double limit = 0.5 * r * (1.0 + 1e-12);
    for (int p = 2; p <= max_dim; ++p) {
        for (const auto& s : K.simplices_by_dim[p - 1]) {
            for (int v = s.back() + 1; v < static_cast<int>(n); ++v) {
                bool clique = true;
                for (int u : s) clique = clique && adj[u][v];
                if (!clique) continue;
                std::vector<int> t = s;
                t.push_back(v);
                if (min_enclosing_ball(points.subset(t)).radius <= limit)
                    K.simplices_by_dim[p].push_back(std::move(t));
            }
        }
        if (K.simplices_by_dim[p].empty()) break;
    }
    return K;
}

namespace reference {

GeometricGraph brute_force_graph(const Points& points, double r) {
    GeometricGraph g;
    const std::size_t n = points.size();
    g.num_vertices = n;
    g.radius = r;
    const double r2 = r * r;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (dist2(points[i], points[j], points.dim) <= r2)
                g.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    UnionFind uf(n);
    for (auto [a, b] : g.edges) uf.unite(a, b);
    g.component_labels = labels_from(uf, n);
    return g;
}

}  // namespace reference

}  // namespace crackle
