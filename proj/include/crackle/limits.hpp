#pragma once

#include <cstdint>
#include <vector>

#include "crackle/distributions.hpp"
#include "crackle/topology.hpp"

namespace crackle {

struct IntensityParams {
    int k = 2;
    int d = 1;
    double alpha = 0.0;  // heavy tail
    double c = 0.0;      // light tail regime constant, may be +inf
    McEstimate h_integral;
};

// \int h(0, y) dy over (R^d)^{k-1}, uniform sampling of [-M, M]^{d(k-1)}.
// half_width <= 0 means M = proximity_bound(c).
McEstimate integrate_h(const Constraint& c, int d, std::size_t mc_samples, std::uint64_t seed,
                       double half_width = 0.0);

// Mass of {x : |x_i| >= eta for all i} under the heavy-tail limit intensity.
double nu_heavy_tail_mass(int k, int d, double alpha, double h_integral, double eta);

// (lo, hi] in R^d; entries may be infinite.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
};

struct RectangleEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    McEstimate x_factor;  // \int over the x-domain of |x|^{-alpha k}
    McEstimate h_factor;  // \int h(0, y) dy / k!
};

// Heavy-tail limit intensity of a product of k boxes. The x-domain is the
// intersection of the boxes.
RectangleEstimate nu_heavy_rectangle(const std::vector<Box>& rect, int k, int d, double alpha,
                                     const Constraint& c, std::size_t mc_samples, std::uint64_t seed);

// Only the x-factor, for ratio checks that share the h-factor.
McEstimate heavy_x_integral(const std::vector<Box>& rect, int d, double alpha, int k,
                            std::size_t mc_samples, std::uint64_t seed);

// Expected limiting count of isolated k-tuples beyond R_kn for a light tail
// with regime constant c (c = +inf allowed).
McEstimate poisson_mean_light(int k, int d, double c, const Constraint& constraint,
                              std::size_t mc_samples, std::uint64_t seed);

// P(max over [0, t_i] <= eta_i, i = 1..K) for the heavy-tail maxima process.
double frechet_fidi(const std::vector<double>& times, const std::vector<double>& thresholds, int k,
                    int d, double alpha, double h_integral);
// Prefactor Lambda in exp(-Lambda eta^{-(alpha k - d)}).
double frechet_prefactor(int k, int d, double alpha, double h_integral);

// Lambda' = (1/(k! k)) \int\int exp(-c^{-1} sum <theta, y_i>) h(0, y) dtheta dy.
McEstimate gumbel_prefactor(int k, int d, double c, const Constraint& constraint,
                            std::size_t mc_samples, std::uint64_t seed);
double gumbel_fidi(const std::vector<double>& times, const std::vector<double>& thresholds, int k,
                   double prefactor);

struct StableSeriesSpec {
    double alpha = 1.3;
    std::size_t n_terms = 100000;
    double C_alpha = 1.0;

    // C_alpha = (h_integral / (2 alpha - 1))^{1/(2 alpha - 1)}.
    static StableSeriesSpec from_h_integral(double alpha, double h_integral,
                                            std::size_t n_terms = 100000);
    // Variance bound of the dropped terms: C_alpha^2 sum_{j > N} j^{-2/(2 alpha - 1)}.
    double tail_variance_bound() const;
};

// C_alpha sum_j r_j Gamma_j^{-1/(2 alpha - 1)}, truncated at n_terms.
double stable_series_sample(const StableSeriesSpec& spec, std::uint64_t seed, bool flip_signs = false);

namespace reference {
// Single-threaded integrate_h; bitwise equal to the parallel version.
McEstimate integrate_h(const Constraint& c, int d, std::size_t mc_samples, std::uint64_t seed,
                       double half_width = 0.0);
}  // namespace reference

}  // namespace crackle
