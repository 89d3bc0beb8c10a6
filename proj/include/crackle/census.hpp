#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "crackle/distributions.hpp"
#include "crackle/scaling.hpp"
#include "crackle/stats.hpp"
#include "crackle/topology.hpp"

namespace crackle {

// Isolated components of size k of G(points, r), all norms >= R, with h = 1.
long count_crackle_tuples(const Points& points, int k, const Constraint& c, double r, double R);

// (k+1)-subsets with all norms >= R whose Cech complex at r is connected.
long count_connected_tuples(const Points& points, int k_plus_1, double r, double R);

// k-subsets with all norms >= R and h = 1, isolated or not.
long count_constrained_tuples(const Points& points, const Constraint& c, double r, double R);

// beta_p of the Cech complex at r on the points with norm >= R.
long betti_outside_ball(const Points& points, double r, double R, int betti_index);

struct AnnuliTable {
    std::vector<double> radii;          // R_2 > R_3 > ... > R_K
    std::vector<int> sizes;             // tuple size of each column
    std::vector<std::vector<long>> counts;  // row j: Ann(R_{j+2}, R_{j+1}), row 0 unbounded above
};

// Isolated components lying inside one annulus and matching one of the graphs.
AnnuliTable annuli_census(const Points& points, double r, const std::vector<double>& radii,
                          const std::vector<Constraint>& graphs);

struct MaximaPath {
    std::vector<double> t;
    std::vector<double> value;  // -inf before the first qualifying tuple
};

// Running maximum of (|X_{i_1}| - d_kn)/c_kn over isolated k-components with
// h = 1 whose largest index is <= floor(N t); i_1 is the smallest index.
MaximaPath maxima_path(const Points& points, const Constraint& c, double r, const ScalingSolution& s,
                       const std::vector<double>& t_grid);

// Sum of X_{i_1} over isolated pairs with h = 1, divided by R_2n (d = 1, k = 2).
double partial_sum_statistic(const Points& points, double r, double R2n, const Constraint& c);

enum class Statistic { Crackle, Constrained, Betti, MaximaEndpoint, PartialSum };
const char* statistic_name(Statistic s);
Statistic parse_statistic(const std::string& s);

struct ExperimentConfig {
    Family family = Family::HeavyPolynomial;
    double alpha = 2.0;  // HeavyPolynomial
    double tau = 1.0;    // LightVonMises
    int d = 1;
    std::vector<double> n_grid{1e3};
    int k = 2;
    Constraint constraint = Constraint::connected(2);
    RnRule rn = RnRule::constant(1.0);
    int replications = 100;
    std::uint64_t master_seed = 1;
    Statistic statistic = Statistic::Crackle;
    // Generate only points that can matter (|x| >= R - r) instead of the full cloud.
    bool restricted_sampler = true;
    std::size_t lambda_mc_samples = 200000;

    RadialDensity density() const;
    void validate() const;
};

struct CensusPoint {
    double n = 0.0;
    double r_n = 0.0;
    ScalingSolution scaling;
    std::vector<std::uint64_t> seeds;
    std::vector<double> values;  // per replication (counts are integral)
    double mean = 0.0;
    double variance = 0.0;
    double lambda = 0.0;  // NaN when no limit is available
    double lambda_stderr = 0.0;
    bool has_fit = false;
    PoissonFit fit_theory;  // against lambda
    PoissonFit fit_empirical;  // against Poi(mean)
};

struct CensusReport {
    ExperimentConfig config;
    Regime regime;
    std::vector<CensusPoint> points;
    double runtime_seconds = 0.0;
};

// One replication of the configured statistic at grid point `point`.
double replication_value(const ExperimentConfig& cfg, const RadialDensity& density, double n,
                         double r_n, const ScalingSolution& s, std::uint64_t seed);

CensusReport run_replications(const ExperimentConfig& cfg);

struct PalmConfig {
    std::shared_ptr<const RadialDensity> density;
    double n = 500.0;
    Constraint constraint = Constraint::connected(2);
    double r = 1.0;
    double R = 1.0;
    int direct_replications = 2000;
    std::size_t palm_samples = 200000;
    std::uint64_t seed = 1;
};

struct PalmResult {
    double direct = 0.0;
    double direct_stderr = 0.0;
    double palm = 0.0;
    double palm_stderr = 0.0;
    double combined_stderr = 0.0;
};

// Sum over tuples of the isolated-and-h indicator beyond R, estimated directly
// from sampled clouds and through the Palm identity.
PalmResult palm_crosscheck(const PalmConfig& cfg);

namespace reference {
// Full-cloud scan without the outer-shell restriction.
long count_crackle_tuples(const Points& points, int k, const Constraint& c, double r, double R);
// Exhaustive subset enumeration.
long count_connected_tuples(const Points& points, int k_plus_1, double r, double R);
long count_constrained_tuples(const Points& points, const Constraint& c, double r, double R);
// Serial replication loop.
CensusReport run_replications(const ExperimentConfig& cfg);
}  // namespace reference

}  // namespace crackle
