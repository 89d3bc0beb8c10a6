#pragma once

#include <functional>
#include <vector>

namespace crackle {

double sample_mean(const std::vector<double>& x);
double sample_variance(const std::vector<double>& x);  // unbiased
std::vector<double> to_doubles(const std::vector<long>& counts);

double poisson_pmf(long k, double lambda);

// sup |F_n - F| against a continuous CDF.
double ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);
// sup |F_n - G_m|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Hill estimate of the tail index from the k_top largest |x|.
double hill_tail_index(std::vector<double> x, std::size_t k_top);

struct PoissonFit {
    double lambda = 0.0;
    double chi_square = 0.0;
    int dof = 0;
    double p_value = 1.0;
    double tv_distance = 0.0;
    int bins = 0;
};

// Total variation between the empirical pmf of counts and Poi(lambda), tail included.
double tv_to_poisson(const std::vector<long>& counts, double lambda);

// Chi-square over bins pooled to expected >= 5; dof = bins - 1 - fitted_params.
PoissonFit poisson_gof(const std::vector<long>& counts, double lambda, int fitted_params = 0);

}  // namespace crackle
