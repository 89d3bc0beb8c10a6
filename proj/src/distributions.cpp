#include "crackle/distributions.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "crackle/errors.hpp"

namespace crackle {

namespace bm = boost::math;

const char* family_name(Family f) {
    switch (f) {
        case Family::HeavyPolynomial: return "HeavyPolynomial";
        case Family::LightVonMises: return "LightVonMises";
        case Family::PluggablePsi: return "PluggablePsi";
    }
    return "unknown";
}

double sphere_surface_area(int d) {
    if (d < 1) throw ParameterError("dimension must be >= 1");
    if (d == 1) return 2.0;
    const double pi = bm::constants::pi<double>();
    return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double unit_ball_volume(int d) { return sphere_surface_area(d) / d; }

namespace {

// \int_0^inf r^{d-1} g(r) dr, split at 1 with r = 1/s on the outer piece.
template <class G>
double radial_moment(G g, int d) {
    bm::quadrature::tanh_sinh<double> ts;
    auto inner = [&](double r) { return std::pow(r, d - 1) * g(r); };
    auto outer = [&](double s) {
        if (s <= 0.0) return 0.0;
        double v = std::pow(s, -d - 1) * g(1.0 / s);
        return std::isfinite(v) ? v : 0.0;
    };
    double tol = 1e-13;
    return ts.integrate(inner, 0.0, 1.0, tol) + ts.integrate(outer, 0.0, 1.0, tol);
}

void check_dim(int d) {
    if (d < 1) throw ParameterError("dimension must be >= 1");
}

}  // namespace

double normalizing_constant(Family family, double param, int d) {
    check_dim(d);
    double m = 0.0;
    if (family == Family::HeavyPolynomial) {
        if (!(param > d))
            throw DomainError("HeavyPolynomial requires alpha > d (integral diverges)");
        double a = param;
        m = radial_moment([a](double r) { return 1.0 / (1.0 + std::pow(r, a)); }, d);
    } else if (family == Family::LightVonMises) {
        if (!(param > 0.0)) throw DomainError("LightVonMises requires tau > 0");
        double t = param;
        m = radial_moment([t](double r) { return std::exp(-std::pow(r, t) / t); }, d);
    } else {
        throw ParameterError("PluggablePsi needs psi functions");
    }
    return 1.0 / (sphere_surface_area(d) * m);
}

double normalizing_constant(const PsiFunctions& psi, int d) {
    check_dim(d);
    if (!psi.psi) throw ParameterError("psi function missing");
    auto g = [&](double r) { return std::exp(-psi.psi(r)); };
    double m = radial_moment(g, d);
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("psi density is not integrable");
    return 1.0 / (sphere_surface_area(d) * m);
}

// Cumulative radial mass of a pluggable density on a grid.
struct PsiTable {
    std::vector<double> r;
    std::vector<double> cdf;
};

namespace {

double gk_integral(const std::function<double(double)>& f, double a, double b) {
    return bm::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-14);
}

std::shared_ptr<const PsiTable> build_psi_table(const RadialDensity& dens) {
    auto t = std::make_shared<PsiTable>();
    std::function<double(double)> pdf = [&dens](double x) { return dens.radial_pdf(x); };
    // Grid out to where the survival mass is negligible.
    double h = 1.0 / 64.0;
    double r = 0.0;
    double acc = 0.0;
    t->r.push_back(0.0);
    t->cdf.push_back(0.0);
    for (int i = 0; i < 1 << 20; ++i) {
        double next = r + h * std::max(1.0, r);
        double piece = gk_integral(pdf, r, next);
        acc += piece;
        r = next;
        t->r.push_back(r);
        t->cdf.push_back(acc);
        if (r > 1.0 && dens.radial_pdf(r) * r < 1e-18) break;
    }
    // Renormalise the tiny quadrature drift so the table ends at 1.
    double total = t->cdf.back();
    for (double& c : t->cdf) c /= total;
    return t;
}

}  // namespace

RadialDensity RadialDensity::heavy(double alpha, int d) {
    RadialDensity f;
    f.family_ = Family::HeavyPolynomial;
    f.dim_ = d;
    f.alpha_ = alpha;
    f.C_ = normalizing_constant(Family::HeavyPolynomial, alpha, d);
    return f;
}

RadialDensity RadialDensity::light(double tau, int d) {
    RadialDensity f;
    f.family_ = Family::LightVonMises;
    f.dim_ = d;
    f.tau_ = tau;
    f.C_ = normalizing_constant(Family::LightVonMises, tau, d);
    return f;
}

RadialDensity RadialDensity::pluggable(PsiFunctions psi, int d) {
    if (!psi.psi || !psi.dpsi || !psi.inverse)
        throw ParameterError("PluggablePsi requires psi, psi' and psi^{-1}");
    RadialDensity f;
    f.family_ = Family::PluggablePsi;
    f.dim_ = d;
    f.C_ = normalizing_constant(psi, d);
    f.psi_ = std::make_shared<const PsiFunctions>(std::move(psi));
    f.table_ = build_psi_table(f);
    return f;
}

double RadialDensity::psi(double z) const {
    switch (family_) {
        case Family::HeavyPolynomial: return std::log1p(std::pow(z, alpha_));
        case Family::LightVonMises: return std::pow(z, tau_) / tau_;
        case Family::PluggablePsi: return psi_->psi(z);
    }
    return 0.0;
}

double RadialDensity::log_profile(double r) const { return std::log(C_) - psi(r); }

double RadialDensity::profile(double r) const { return C_ * std::exp(-psi(r)); }

double RadialDensity::radial_pdf(double r) const {
    if (r < 0.0) return 0.0;
    if (r == 0.0 && dim_ > 1) return 0.0;
    return sphere_surface_area(dim_) * std::pow(r, dim_ - 1) * profile(r);
}

double RadialDensity::radial_cdf(double r) const {
    if (r <= 0.0) return 0.0;
    if (std::isinf(r)) return 1.0;
    switch (family_) {
        case Family::HeavyPolynomial: {
            // F_R(r) = I_x(d/alpha, 1 - d/alpha), x = r^a/(1+r^a).
            double a = dim_ / alpha_, b = 1.0 - a;
            double ra = std::pow(r, alpha_);
            double x = ra / (1.0 + ra);
            double y = 1.0 / (1.0 + ra);
            return x <= 0.5 ? bm::ibeta(a, b, x) : bm::ibetac(b, a, y);
        }
        case Family::LightVonMises:
            return bm::gamma_p(dim_ / tau_, std::pow(r, tau_) / tau_);
        case Family::PluggablePsi: {
            const auto& t = *table_;
            if (r >= t.r.back()) return 1.0;
            auto it = std::upper_bound(t.r.begin(), t.r.end(), r);
            std::size_t i = static_cast<std::size_t>(it - t.r.begin()) - 1;
            std::function<double(double)> pdf = [this](double x) { return radial_pdf(x); };
            return std::min(1.0, t.cdf[i] + gk_integral(pdf, t.r[i], r));
        }
    }
    return 0.0;
}

double RadialDensity::radial_sf(double r) const {
    if (r <= 0.0) return 1.0;
    if (std::isinf(r)) return 0.0;
    switch (family_) {
        case Family::HeavyPolynomial: {
            double a = dim_ / alpha_, b = 1.0 - a;
            double ra = std::pow(r, alpha_);
            double x = ra / (1.0 + ra);
            double y = 1.0 / (1.0 + ra);
            return x <= 0.5 ? bm::ibetac(a, b, x) : bm::ibeta(b, a, y);
        }
        case Family::LightVonMises:
            return bm::gamma_q(dim_ / tau_, std::pow(r, tau_) / tau_);
        case Family::PluggablePsi: {
            const auto& t = *table_;
            if (r >= t.r.back()) return 0.0;
            auto it = std::upper_bound(t.r.begin(), t.r.end(), r);
            std::size_t i = static_cast<std::size_t>(it - t.r.begin());
            std::function<double(double)> pdf = [this](double x) { return radial_pdf(x); };
            double tail = (1.0 - t.cdf[i]) + gk_integral(pdf, r, t.r[i]);
            return std::max(0.0, tail);
        }
    }
    return 0.0;
}

namespace {

// Safeguarded Newton on a monotone increasing function g with g(lo) <= 0 <= g(hi).
template <class G, class D>
double monotone_root(G g, D dg, double lo, double hi, double tol) {
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double v = g(x);
        if (v == 0.0) return x;
        if (v < 0.0) lo = x; else hi = x;
        double slope = dg(x);
        double nx = (slope > 0.0) ? x - v / slope : 0.5 * (lo + hi);
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::abs(nx - x) <= tol * std::max(1.0, std::abs(x)) || hi - lo <= tol * std::max(1.0, hi))
            return nx;
        x = nx;
    }
    return x;
}

}  // namespace

double RadialDensity::radial_quantile(double u) const {
    if (!(u >= 0.0 && u < 1.0)) throw DomainError("radial_quantile needs u in [0,1)");
    if (u == 0.0) return 0.0;
    if (u > 0.5) return radial_sf_quantile(1.0 - u);
    switch (family_) {
        case Family::HeavyPolynomial: {
            double a = dim_ / alpha_, b = 1.0 - a;
            double x = bm::ibeta_inv(a, b, u);
            return std::pow(x / (1.0 - x), 1.0 / alpha_);
        }
        case Family::LightVonMises:
            return std::pow(tau_ * bm::gamma_p_inv(dim_ / tau_, u), 1.0 / tau_);
        case Family::PluggablePsi: {
            const auto& t = *table_;
            auto it = std::lower_bound(t.cdf.begin(), t.cdf.end(), u);
            std::size_t i = static_cast<std::size_t>(it - t.cdf.begin());
            double lo = t.r[i == 0 ? 0 : i - 1], hi = t.r[std::min(i, t.r.size() - 1)];
            return monotone_root([&](double r) { return radial_cdf(r) - u; },
                                 [&](double r) { return radial_pdf(r); }, lo, hi, 1e-14);
        }
    }
    return 0.0;
}

double RadialDensity::radial_sf_quantile(double q) const {
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("radial_sf_quantile needs q in (0,1]");
    if (q == 1.0) return 0.0;
    switch (family_) {
        case Family::HeavyPolynomial: {
            // survival = I_y(b, a) with y = 1/(1+r^alpha).
            double a = dim_ / alpha_, b = 1.0 - a;
            double y = q < 0.5 ? bm::ibeta_inv(b, a, q) : 1.0 - bm::ibeta_inv(a, b, 1.0 - q);
            return std::pow((1.0 - y) / y, 1.0 / alpha_);
        }
        case Family::LightVonMises:
            return std::pow(tau_ * bm::gamma_q_inv(dim_ / tau_, q), 1.0 / tau_);
        case Family::PluggablePsi: {
            const auto& t = *table_;
            // first grid index whose survival drops to q or below
            std::size_t lo_i = 0, hi_i = t.r.size() - 1;
            while (hi_i - lo_i > 1) {
                std::size_t mid = (lo_i + hi_i) / 2;
                if (1.0 - t.cdf[mid] > q) lo_i = mid; else hi_i = mid;
            }
            double lo = t.r[lo_i], hi = t.r[hi_i];
            if (radial_sf(hi) > q) {
                while (radial_sf(hi) > q) hi *= 2.0;
            }
            return monotone_root([&](double r) { return q - radial_sf(r); },
                                 [&](double r) { return radial_pdf(r); }, lo, hi, 1e-14);
        }
    }
    return 0.0;
}

double RadialDensity::a(double z) const {
    if (!(z > 0.0)) throw DomainError("a(z) needs z > 0");
    double dp = 0.0;
    switch (family_) {
        case Family::HeavyPolynomial:
            throw UnsupportedError("a(z) is defined for light-tailed densities only");
        case Family::LightVonMises: return std::pow(z, 1.0 - tau_);
        case Family::PluggablePsi: dp = psi_->dpsi(z); break;
    }
    if (!(dp > 0.0)) throw DomainError("psi'(z) <= 0, a(z) undefined");
    return 1.0 / dp;
}

double RadialDensity::psi_inverse(double y) const {
    if (!(y >= 0.0)) throw DomainError("psi inverse needs a non-negative argument");
    switch (family_) {
        case Family::HeavyPolynomial: return std::pow(std::expm1(y), 1.0 / alpha_);
        case Family::LightVonMises: return std::pow(tau_ * y, 1.0 / tau_);
        case Family::PluggablePsi: return psi_->inverse(y);
    }
    return 0.0;
}

void sample_direction(Rng& rng, int d, double* out) {
    if (d == 1) {
        out[0] = rng.sign();
        return;
    }
    double s = 0.0;
    do {
        s = 0.0;
        for (int j = 0; j < d; ++j) {
            out[j] = rng.normal();
            s += out[j] * out[j];
        }
    } while (s == 0.0);
    s = 1.0 / std::sqrt(s);
    for (int j = 0; j < d; ++j) out[j] *= s;
}

PointCloud sample_cloud(double n, const RadialDensity& density, std::uint64_t seed) {
    if (!(n >= 0.0)) throw ParameterError("n must be non-negative");
    PointCloud c;
    c.points = Points(density.dim());
    c.intensity_n = n;
    c.density = std::make_shared<const RadialDensity>(density);
    c.seed = seed;
    Rng rng(seed);
    std::uint64_t N = rng.poisson(n);
    const int d = density.dim();
    c.points.coords.resize(N * d);
    for (std::uint64_t i = 0; i < N; ++i) {
        double r = density.radial_quantile(rng.uniform());
        double* x = c.points[i];
        sample_direction(rng, d, x);
        for (int j = 0; j < d; ++j) x[j] *= r;
    }
    return c;
}

PointCloud sample_cloud_beyond(double n, const RadialDensity& density, double rmin,
                               std::uint64_t seed) {
    if (!(n >= 0.0)) throw ParameterError("n must be non-negative");
    if (rmin <= 0.0) return sample_cloud(n, density, seed);
    PointCloud c;
    c.points = Points(density.dim());
    c.intensity_n = n;
    c.density = std::make_shared<const RadialDensity>(density);
    c.seed = seed;
    c.cutoff = rmin;
    Rng rng(seed);
    double p = density.radial_sf(rmin);
    std::uint64_t M = rng.poisson(n * p);
    const int d = density.dim();
    c.points.coords.resize(M * d);
    for (std::uint64_t i = 0; i < M; ++i) {
        double q = p * rng.uniform_open0();
        double r = std::max(rmin, density.radial_sf_quantile(q));
        double* x = c.points[i];
        sample_direction(rng, d, x);
        for (int j = 0; j < d; ++j) x[j] *= r;
    }
    return c;
}

McEstimate union_of_balls_probability(const Points& centers, double r,
                                      const RadialDensity& density, std::size_t mc_samples,
                                      std::uint64_t seed) {
    if (mc_samples == 0) throw ParameterError("mc_samples must be positive");
    if (centers.empty()) throw ParameterError("at least one center required");
    if (!(r > 0.0)) throw ParameterError("radius must be positive");
    const int d = centers.dim;
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (int j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], centers[i][j] - r);
            hi[j] = std::max(hi[j], centers[i][j] + r);
        }
    double vol = 1.0;
    for (int j = 0; j < d; ++j) vol *= hi[j] - lo[j];
    Rng rng(seed);
    std::vector<double> x(d);
    double s = 0.0, s2 = 0.0, r2 = r * r;
    for (std::size_t m = 0; m < mc_samples; ++m) {
        double nx = 0.0;
        for (int j = 0; j < d; ++j) {
            x[j] = rng.uniform(lo[j], hi[j]);
            nx += x[j] * x[j];
        }
        bool inside = false;
        for (std::size_t i = 0; i < centers.size() && !inside; ++i)
            inside = dist2(x.data(), centers[i], d) <= r2;
        double v = inside ? vol * density.profile(std::sqrt(nx)) : 0.0;
        s += v;
        s2 += v * v;
    }
    double N = static_cast<double>(mc_samples);
    double mean = s / N;
    double var = std::max(0.0, s2 / N - mean * mean);
    return {mean, std::sqrt(var / N)};
}

double interval_mass_1d(double a, double b, const RadialDensity& density) {
    if (density.dim() != 1) throw UnsupportedError("interval mass is defined for d = 1");
    if (!(b > a)) return 0.0;
    if (a >= 0.0) return 0.5 * (density.radial_sf(a) - density.radial_sf(b));
    if (b <= 0.0) return 0.5 * (density.radial_sf(-b) - density.radial_sf(-a));
    return 0.5 * (density.radial_cdf(-a) + density.radial_cdf(b));
}

double union_of_balls_mass_1d(std::vector<double> centers, double r, const RadialDensity& density) {
    if (centers.empty()) return 0.0;
    std::sort(centers.begin(), centers.end());
    double total = 0.0;
    double a = centers[0] - r, b = centers[0] + r;
    for (std::size_t i = 1; i < centers.size(); ++i) {
        if (centers[i] - r <= b) {
            b = centers[i] + r;
        } else {
            total += interval_mass_1d(a, b, density);
            a = centers[i] - r;
            b = centers[i] + r;
        }
    }
    return total + interval_mass_1d(a, b, density);
}

}  // namespace crackle
