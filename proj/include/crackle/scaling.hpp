#pragma once

#include <string>
#include <vector>

#include "crackle/distributions.hpp"

namespace crackle {

// Radius sequence r_n: constant, n^s, or (log n)^p.
struct RnRule {
    enum class Kind { Constant, Power, LogPower };
    Kind kind = Kind::Constant;
    double value = 1.0;

    static RnRule constant(double c) { return {Kind::Constant, c}; }
    static RnRule power(double s) { return {Kind::Power, s}; }
    static RnRule log_power(double p) { return {Kind::LogPower, p}; }
    double operator()(double n) const;
    std::string to_string() const;           // "constant:1", "power:-0.1", "logpower:-0.25"
    static RnRule parse(const std::string& s);
};

struct Regime {
    enum class Kind { Nontrivial, Vanishing, Unclassified };
    Kind kind = Kind::Unclassified;
    double c = 0.0;  // limit of a(R_kn)/r_n; +inf allowed
    std::string note;
    std::string to_string() const;
};

struct ScalingSolution {
    double R_kn = 0.0;
    double c_kn = 1.0;
    double d_kn = 0.0;
    double closed_form = 0.0;  // asymptotic (heavy) or logarithmic (light) formula
    double residual = 0.0;     // |lhs - 1| of the defining equation
    Regime regime;
};

// n^k r^{d(k-1)} R^d f(R e_1)^k = 1 for a HeavyPolynomial density.
ScalingSolution solve_R_heavy(double n, int k, const RadialDensity& density, double r_n);
double heavy_closed_form(double n, int k, const RadialDensity& density, double r_n);
// Same with an explicit profile C/(1+|x|^alpha) in R^d.
ScalingSolution solve_R_heavy(double n, int k, int d, double alpha, double C, double r_n);
double heavy_closed_form(double n, int k, int d, double alpha, double C, double r_n);

// n^k r^{d(k-1)} a(R) R^{d-1} f(R e_1)^k = 1 for a light-tailed density.
ScalingSolution solve_R_light(double n, int k, const RadialDensity& density, double r_n);
double light_closed_form(double n, int k, const RadialDensity& density, double r_n);
// Explicit profile C exp(-|x|^tau / tau).
ScalingSolution solve_R_light(double n, int k, int d, double tau, double C, double r_n);
double light_closed_form(double n, int k, int d, double tau, double C, double r_n);

// Dispatches on the density family.
ScalingSolution solve_R(double n, int k, const RadialDensity& density, double r_n);

double a_of(double z, const RadialDensity& density);

// Analytic classification of a(R_kn)/r_n, checked against the numeric probe.
Regime classify_regime(const RadialDensity& density, const RnRule& rule, int k,
                       const std::vector<double>& n_probe);

// Admissible band for r_n = n^s: -k/(d(k-1)) < s <= 0.
void check_power_band(const RnRule& rule, int k, int d);

struct ContractibilityRadii {
    double n = 0.0;
    double r_n = 0.0;
    double A_n = 0.0;
    double B_n = 0.0;
    double R0 = 0.0;
    double R1 = 0.0;
};

ContractibilityRadii contractibility_radii(double n, const RadialDensity& density, const RnRule& rule,
                                           double delta, double g);

// (x - d_kn S(x)) / c_kn with S(x) = (|x_1|, ..., |x_d|) / |x|.
std::vector<double> normalize_point(const std::vector<double>& x, const ScalingSolution& s);

}  // namespace crackle
