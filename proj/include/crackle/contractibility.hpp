#pragma once

#include <cstdint>

#include "crackle/distributions.hpp"
#include "crackle/scaling.hpp"

namespace crackle {

// Simulation layout for the covering/emptiness event in d = 1. The core
// [-a, a] is split into tiles of length r_n; every tile being occupied implies
// coverage of the core, and the union bound over tiles is eps_bound.
struct ContractibilityPlan {
    ContractibilityRadii radii;
    double a = 0.0;          // window start
    double eps_bound = 0.0;  // P(some core tile empty) <= eps_bound
    double window_mean = 0.0;  // expected points in [max(0, a - r), R0] on one side
};

ContractibilityPlan contractibility_plan(double n, const RadialDensity& density, const RnRule& rule,
                                         double delta, double g, double eps_target = 1e-6);

struct ContractibilityOutcome {
    bool covered = false;       // B(0, R0) covered by r_n-balls around points inside it
    bool empty_beyond = false;  // no points with |x| > R1
    bool joint() const { return covered && empty_beyond; }
};

// One draw of the event. Only the windows max(0, a - r) <= |x| <= R0 are
// simulated; the result differs from the full-cloud event only when a core
// tile is empty, so by at most eps_bound in probability.
ContractibilityOutcome contractibility_event(const ContractibilityPlan& plan, const RadialDensity& density,
                                             std::uint64_t seed);

struct ContractibilityEstimate {
    ContractibilityPlan plan;
    int trials = 0;
    double covered = 0.0;
    double empty_beyond = 0.0;
    double joint = 0.0;
    double joint_stderr = 0.0;
};

ContractibilityEstimate estimate_contractibility(double n, const RadialDensity& density,
                                                 const RnRule& rule, double delta, double g,
                                                 int trials, std::uint64_t seed);

namespace reference {
// Exact event on a fully sampled d = 1 cloud.
ContractibilityOutcome contractibility_event_full(double n, const RadialDensity& density,
                                                  const ContractibilityRadii& radii, std::uint64_t seed);
}  // namespace reference

}  // namespace crackle
