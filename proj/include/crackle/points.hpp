#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace crackle {

// Flat row-major storage of points in R^d.
struct Points {
    int dim = 1;
    std::vector<double> coords;

    Points() = default;
    explicit Points(int d) : dim(d) {}
    Points(int d, std::vector<double> c) : dim(d), coords(std::move(c)) {}

    std::size_t size() const { return coords.size() / static_cast<std::size_t>(dim); }
    bool empty() const { return coords.empty(); }
    const double* operator[](std::size_t i) const { return coords.data() + i * dim; }
    double* operator[](std::size_t i) { return coords.data() + i * dim; }

    void push_back(const double* x) { coords.insert(coords.end(), x, x + dim); }
    void push_back(std::initializer_list<double> x) { coords.insert(coords.end(), x); }

    double norm(std::size_t i) const {
        const double* x = (*this)[i];
        double s = 0.0;
        for (int j = 0; j < dim; ++j) s += x[j] * x[j];
        return std::sqrt(s);
    }

    Points subset(const std::vector<int>& idx) const {
        Points out(dim);
        out.coords.reserve(idx.size() * dim);
        for (int i : idx) out.push_back((*this)[i]);
        return out;
    }
};

inline double dist2(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
        double t = a[j] - b[j];
        s += t * t;
    }
    return s;
}

}  // namespace crackle
