#include "crackle/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "crackle/errors.hpp"

namespace crackle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + e^x) without overflow.
double log1p_exp(double x) { return x > 35.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// Root of a function that is positive at lo and eventually negative.
double bisect_decreasing(const std::function<double(double)>& F, double lo) {
    if (!(F(lo) > 0.0)) throw SolverError("scaling equation has no root: left side never exceeds 1");
    double hi = std::max(1.0, 2.0 * lo);
    int guard = 0;
    while (F(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 2000 || !std::isfinite(hi)) throw SolverError("scaling bracket did not close");
    }
    for (int it = 0; it < 400 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (F(mid) > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Largest value of F on a log grid in [2^-40, 2^40].
double grid_argmax(const std::function<double(double)>& F) {
    double best = -kInf, arg = 1.0;
    for (int j = -160; j <= 160; ++j) {
        double z = std::pow(2.0, j / 4.0);
        double v = F(z);
        if (std::isfinite(v) && v > best) {
            best = v;
            arg = z;
        }
    }
    return arg;
}

void check_common(double n, int k, double r_n) {
    if (!(n > 0.0)) throw ParameterError("n must be positive");
    if (k < 2) throw ParameterError("k must be >= 2");
    if (!(r_n > 0.0) || !std::isfinite(r_n)) throw ParameterError("r_n must be positive and finite");
}

double light_log_lhs(double R, double n, int k, int d, double tau, double C, double r_n) {
    return k * std::log(n) + d * (k - 1) * std::log(r_n) + (1.0 - tau) * std::log(R) +
           (d - 1) * std::log(R) + k * std::log(C) - k * std::pow(R, tau) / tau;
}

}  // namespace

double RnRule::operator()(double n) const {
    switch (kind) {
        case Kind::Constant: return value;
        case Kind::Power: return std::pow(n, value);
        case Kind::LogPower:
            if (!(n > 1.0)) throw DomainError("(log n)^p needs n > 1");
            return std::pow(std::log(n), value);
    }
    return value;
}

std::string RnRule::to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case Kind::Constant: os << "constant:"; break;
        case Kind::Power: os << "power:"; break;
        case Kind::LogPower: os << "logpower:"; break;
    }
    os << value;
    return os.str();
}

RnRule RnRule::parse(const std::string& s) {
    auto colon = s.find(':');
    std::string head = colon == std::string::npos ? "constant" : s.substr(0, colon);
    std::string num = colon == std::string::npos ? s : s.substr(colon + 1);
    double v = 0.0;
    try {
        std::size_t used = 0;
        v = std::stod(num, &used);
        if (used != num.size()) throw std::invalid_argument(num);
    } catch (const std::exception&) {
        throw ConfigError("bad r_n value '" + s + "'");
    }
    if (head == "constant") {
        if (!(v > 0.0)) throw ParameterError("constant r_n must be positive");
        return constant(v);
    }
    if (head == "power") return power(v);
    if (head == "logpower") return log_power(v);
    throw ConfigError("unknown r_n rule '" + head + "' (constant, power, logpower)");
}

std::string Regime::to_string() const {
    switch (kind) {
        case Kind::Nontrivial: {
            if (std::isinf(c)) return "NontrivialLimit(inf)";
            std::ostringstream os;
            os.precision(17);
            os << "NontrivialLimit(" << c << ")";
            return os.str();
        }
        case Kind::Vanishing: return "Vanishing";
        case Kind::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

ScalingSolution solve_R_heavy(double n, int k, int d, double alpha, double C, double r_n) {
    check_common(n, k, r_n);
    if (!(alpha > d)) throw DomainError("heavy tail requires alpha > d");
    if (!(C > 0.0)) throw ParameterError("C must be positive");
    const double base = k * std::log(n) + d * (k - 1) * std::log(r_n) + k * std::log(C);
    auto F = [=](double R) { return base + d * std::log(R) - k * log1p_exp(alpha * std::log(R)); };
    // Left side peaks at R^alpha = d / (k alpha - d).
    double peak = std::pow(d / (k * alpha - d), 1.0 / alpha);
    ScalingSolution s;
    s.R_kn = bisect_decreasing(F, peak);
    s.c_kn = s.R_kn;
    s.d_kn = 0.0;
    s.closed_form = heavy_closed_form(n, k, d, alpha, C, r_n);
    s.residual = std::fabs(std::expm1(F(s.R_kn)));
    s.regime.kind = Regime::Kind::Nontrivial;
    s.regime.c = kInf;
    s.regime.note = "heavy tail";
    return s;
}

double heavy_closed_form(double n, int k, int d, double alpha, double C, double r_n) {
    double e = 1.0 / (k * alpha - d);
    return std::exp(e * (k * std::log(C) + k * std::log(n) + d * (k - 1) * std::log(r_n)));
}

ScalingSolution solve_R_heavy(double n, int k, const RadialDensity& density, double r_n) {
    if (density.family() != Family::HeavyPolynomial)
        throw ParameterError("solve_R_heavy needs a HeavyPolynomial density");
    return solve_R_heavy(n, k, density.dim(), density.alpha(), density.scale_C(), r_n);
}

double heavy_closed_form(double n, int k, const RadialDensity& density, double r_n) {
    return heavy_closed_form(n, k, density.dim(), density.alpha(), density.scale_C(), r_n);
}

ScalingSolution solve_R_light(double n, int k, int d, double tau, double C, double r_n) {
    check_common(n, k, r_n);
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    if (!(C > 0.0)) throw ParameterError("C must be positive");
    auto F = [=](double R) { return light_log_lhs(R, n, k, d, tau, C, r_n); };
    // Left side peaks at R^tau = (d - tau)/k; for d <= tau it decreases from R = 0+.
    double start = d > tau ? std::pow((d - tau) / k, 1.0 / tau) : 1e-12;
    ScalingSolution s;
    s.R_kn = bisect_decreasing(F, start);
    s.c_kn = std::pow(s.R_kn, 1.0 - tau);
    s.d_kn = s.R_kn;
    s.closed_form = light_closed_form(n, k, d, tau, C, r_n);
    s.residual = std::fabs(std::expm1(F(s.R_kn)));
    return s;
}

double light_closed_form(double n, int k, int d, double tau, double C, double r_n) {
    double L = tau * std::log(n);
    double v = L + tau * d * (k - 1) / static_cast<double>(k) * std::log(r_n) +
               (d - tau) / k * std::log(L) + tau * std::log(C);
    if (!(v > 0.0)) throw DomainError("logarithmic closed form is not defined at this n");
    return std::pow(v, 1.0 / tau);
}

ScalingSolution solve_R_light(double n, int k, const RadialDensity& density, double r_n) {
    if (density.family() == Family::LightVonMises)
        return solve_R_light(n, k, density.dim(), density.tau(), density.scale_C(), r_n);
    if (density.family() != Family::PluggablePsi)
        throw ParameterError("solve_R_light needs a light-tailed density");
    check_common(n, k, r_n);
    const int d = density.dim();
    const double base = k * std::log(n) + d * (k - 1) * std::log(r_n) + k * std::log(density.scale_C());
    auto F = [&](double R) {
        double a = density.a(R);
        return base + std::log(a) + (d - 1) * std::log(R) - k * density.psi(R);
    };
    ScalingSolution s;
    s.R_kn = bisect_decreasing(F, grid_argmax(F));
    s.c_kn = density.a(s.R_kn);
    s.d_kn = s.R_kn;
    s.closed_form = std::numeric_limits<double>::quiet_NaN();
    s.residual = std::fabs(std::expm1(F(s.R_kn)));
    return s;
}

double light_closed_form(double n, int k, const RadialDensity& density, double r_n) {
    if (density.family() != Family::LightVonMises)
        throw UnsupportedError("closed form exists for LightVonMises only");
    return light_closed_form(n, k, density.dim(), density.tau(), density.scale_C(), r_n);
}

ScalingSolution solve_R(double n, int k, const RadialDensity& density, double r_n) {
    if (density.family() == Family::HeavyPolynomial) return solve_R_heavy(n, k, density, r_n);
    return solve_R_light(n, k, density, r_n);
}

double a_of(double z, const RadialDensity& density) { return density.a(z); }

void check_power_band(const RnRule& rule, int k, int d) {
    if (rule.kind != RnRule::Kind::Power) return;
    double lower = -static_cast<double>(k) / (d * (k - 1));
    if (!(rule.value > lower && rule.value <= 0.0)) {
        std::ostringstream os;
        os << "r_n = n^s needs " << lower << " < s <= 0; got s = " << rule.value;
        throw DomainError(os.str());
    }
}

Regime classify_regime(const RadialDensity& density, const RnRule& rule, int k,
                       const std::vector<double>& n_probe) {
    if (density.family() == Family::HeavyPolynomial)
        throw ParameterError("regime classification needs a light-tailed density");
    Regime out;
    if (density.family() != Family::LightVonMises) {
        out.note = "no analytic rule for a pluggable potential";
        return out;
    }
    const double tau = density.tau();
    // a(R)/r_n with R ~ (tau log n)^{1/tau}: a(R) ~ (tau log n)^{(1-tau)/tau}.
    const double e_a = (1.0 - tau) / tau;
    switch (rule.kind) {
        case RnRule::Kind::Constant:
            if (tau < 1.0) { out.kind = Regime::Kind::Nontrivial; out.c = kInf; }
            else if (tau == 1.0) { out.kind = Regime::Kind::Nontrivial; out.c = 1.0 / rule.value; }
            else out.kind = Regime::Kind::Vanishing;
            break;
        case RnRule::Kind::Power:
            if (rule.value < 0.0) { out.kind = Regime::Kind::Nontrivial; out.c = kInf; }
            else if (tau < 1.0) { out.kind = Regime::Kind::Nontrivial; out.c = kInf; }
            else if (tau == 1.0) { out.kind = Regime::Kind::Nontrivial; out.c = 1.0; }
            else out.kind = Regime::Kind::Vanishing;
            break;
        case RnRule::Kind::LogPower: {
            double e = e_a - rule.value;
            if (e > 0.0) { out.kind = Regime::Kind::Nontrivial; out.c = kInf; }
            else if (e < 0.0) out.kind = Regime::Kind::Vanishing;
            else { out.kind = Regime::Kind::Nontrivial; out.c = std::pow(tau, e_a); }
            break;
        }
    }

    // Numeric probe: the ratio must move in the direction the rule predicts.
    if (n_probe.size() >= 2) {
        std::vector<double> q;
        for (double n : n_probe) {
            double R = solve_R_light(n, k, density, rule(n)).R_kn;
            q.push_back(density.a(R) / rule(n));
        }
        double first = q.front(), last = q.back();
        bool ok = true;
        if (out.kind == Regime::Kind::Vanishing) ok = last < first;
        else if (std::isinf(out.c)) ok = last > first;
        else ok = std::fabs(last - out.c) <= std::max(std::fabs(first - out.c), 1e-9 * out.c) + 0.25 * out.c;
        if (!ok) {
            out.note = "numeric probe disagrees with the analytic rule";
            out.kind = Regime::Kind::Unclassified;
            out.c = 0.0;
        }
    }
    return out;
}

namespace {

struct RadiiParts {
    double A = 0.0, B = 0.0;
    bool real = false;
};

RadiiParts radii_parts(double n, const RadialDensity& density, const RnRule& rule, double delta) {
    RadiiParts p;
    if (!(n > 1.0)) return p;
    const int d = density.dim();
    double logn = std::log(n);
    double r = rule(n);
    double z = density.psi_inverse(logn);
    double inner = z / r;
    if (!(inner > 1.0) || !(logn > 1.0)) return p;
    double a = density.a(z);
    if (!(a > 0.0)) return p;
    p.A = logn + d * std::log(r) - std::log(std::log(inner)) - delta;
    p.B = logn + (d - 1) * std::log(z) + std::log(a) + std::log(logn);
    p.real = std::isfinite(p.A) && std::isfinite(p.B) && p.A >= 0.0 && p.B >= 0.0;
    return p;
}

}  // namespace

ContractibilityRadii contractibility_radii(double n, const RadialDensity& density, const RnRule& rule,
                                           double delta, double g) {
    if (density.family() == Family::HeavyPolynomial)
        throw ParameterError("contractibility radii need a light-tailed density");
    const int d = density.dim();
    if (!(g > 0.0)) throw ParameterError("g must be positive");
    if (!(d - std::exp(delta) * std::pow(g, d) * density.scale_C() < 0.0))
        throw ParameterError("delta and g must satisfy d - e^delta g^d C < 0");
    RadiiParts p = radii_parts(n, density, rule, delta);
    if (!p.real) {
        double m = 2.0;
        while (m < 1e300 && !radii_parts(m, density, rule, delta).real) m *= 2.0;
        if (m >= 1e300) throw DomainError("A_n, B_n are not real for any n");
        double lo = m / 2.0, hi = m;
        while (hi - lo > 0.5) {
            double mid = 0.5 * (lo + hi);
            if (radii_parts(mid, density, rule, delta).real) hi = mid; else lo = mid;
        }
        std::ostringstream os;
        os.precision(10);
        os << "A_n or B_n is not real at n = " << n << "; minimal admissible n is about " << std::ceil(hi);
        throw DomainError(os.str());
    }
    ContractibilityRadii out;
    out.n = n;
    out.r_n = rule(n);
    out.A_n = p.A;
    out.B_n = p.B;
    out.R0 = density.psi_inverse(p.A);
    out.R1 = density.psi_inverse(p.B);
    return out;
}

std::vector<double> normalize_point(const std::vector<double>& x, const ScalingSolution& s) {
    double nrm = 0.0;
    for (double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    std::vector<double> out(x.size());
    if (s.d_kn != 0.0 && nrm == 0.0) throw DomainError("cannot normalize the origin with a nonzero shift");
    for (std::size_t i = 0; i < x.size(); ++i) {
        double shift = s.d_kn == 0.0 ? 0.0 : s.d_kn * std::fabs(x[i]) / nrm;
        out[i] = (x[i] - shift) / s.c_kn;
    }
    return out;
}

}  // namespace crackle
