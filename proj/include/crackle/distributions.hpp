#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "crackle/points.hpp"
#include "crackle/rng.hpp"

namespace crackle {

enum class Family { HeavyPolynomial, LightVonMises, PluggablePsi };

const char* family_name(Family f);

// User-supplied radial potential for f = C exp(-psi(|x|)).
struct PsiFunctions {
    std::string name;
    std::function<double(double)> psi;
    std::function<double(double)> dpsi;
    std::function<double(double)> inverse;
};

// s_{d-1} = 2 pi^{d/2} / Gamma(d/2); s_0 = 2.
double sphere_surface_area(int d);
double unit_ball_volume(int d);

// C with s_{d-1} C \int_0^inf r^{d-1} g(r) dr = 1.
// param is alpha for HeavyPolynomial and tau for LightVonMises.
double normalizing_constant(Family family, double param, int d);
double normalizing_constant(const PsiFunctions& psi, int d);

struct PsiTable;

// Spherically symmetric density; immutable after construction.
class RadialDensity {
public:
    static RadialDensity heavy(double alpha, int d);
    static RadialDensity light(double tau, int d);
    static RadialDensity pluggable(PsiFunctions psi, int d);

    Family family() const { return family_; }
    int dim() const { return dim_; }
    double alpha() const { return alpha_; }
    double tau() const { return tau_; }
    double scale_C() const { return C_; }
    const PsiFunctions* psi_functions() const { return psi_.get(); }

    // f(x) for |x| = r, and its logarithm.
    double profile(double r) const;
    double log_profile(double r) const;
    // Density of |X|.
    double radial_pdf(double r) const;
    double radial_cdf(double r) const;
    double radial_sf(double r) const;
    double radial_quantile(double u) const;
    // Inverse of the survival function: r with P(|X| > r) = q.
    double radial_sf_quantile(double q) const;

    // Light-tail auxiliary a(z) = 1/psi'(z).
    double a(double z) const;
    double psi(double z) const;
    double psi_inverse(double y) const;

private:
    Family family_ = Family::HeavyPolynomial;
    int dim_ = 1;
    double alpha_ = 0.0;
    double tau_ = 0.0;
    double C_ = 0.0;
    std::shared_ptr<const PsiFunctions> psi_;
    std::shared_ptr<const PsiTable> table_;
};

void sample_direction(Rng& rng, int d, double* out);

struct PointCloud {
    Points points;
    double intensity_n = 0.0;
    std::shared_ptr<const RadialDensity> density;
    std::uint64_t seed = 0;
    // Points with norm below this radius were not generated (0 for a full cloud).
    double cutoff = 0.0;
    int dim() const { return points.dim; }
    std::size_t size() const { return points.size(); }
};

// Poisson(n) points, each with radius radial_quantile(U) times a uniform direction.
PointCloud sample_cloud(double n, const RadialDensity& density, std::uint64_t seed);

// The same Poisson process restricted to |x| >= rmin: Poisson(n P(|X| >= rmin))
// points drawn from the conditional law.
PointCloud sample_cloud_beyond(double n, const RadialDensity& density, double rmin,
                               std::uint64_t seed);

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
};

// f-mass of the union of closed balls B(c_i, r), by uniform sampling of the bounding box.
McEstimate union_of_balls_probability(const Points& centers, double r,
                                      const RadialDensity& density, std::size_t mc_samples,
                                      std::uint64_t seed);

// Exact version for d = 1 (union of intervals).
double union_of_balls_mass_1d(std::vector<double> centers, double r, const RadialDensity& density);

// P(a <= X <= b) for d = 1.
double interval_mass_1d(double a, double b, const RadialDensity& density);

}  // namespace crackle
