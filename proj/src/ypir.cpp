#include "selrec/ypir.hpp"

#include <cmath>
#include <stdexcept>

#include "selrec/errors.hpp"
#include "selrec/quadrature.hpp"

namespace selrec {

namespace {

void check(const YpirParams& par, int m0, double t) {
    if (!(par.s >= 0.0) || !(par.rho >= 0.0) || !(par.r >= 0.0)) throw std::invalid_argument("negative YPIR rate");
    if (m0 < 0) throw std::invalid_argument("negative YPIR start state");
    if (!(t >= 0.0)) throw std::invalid_argument("negative time");
}

// Density of the age u of the process (time since the last initiation or
// reset) at time t, restricted to N_t >= 1 and to at least one such event.
double age_density_from_zero(const YpirParams& par, double t, double u) {
    const double e_rho = std::exp(-par.rho * (t - u));
    const double e_r = std::exp(-par.r * u);
    return par.r * e_r * (1.0 - e_rho) + par.rho * e_rho * e_r;
}

double age_density_from_positive(const YpirParams& par, double u) { return par.r * std::exp(-par.r * u); }

// Support needed so that a geometric law with success probability sigma has
// tail below tol.
std::size_t geometric_support(double sigma, double tol) {
    if (sigma >= 1.0) return 2;
    const double n = std::ceil(std::log(tol) / std::log1p(-sigma)) + 2.0;
    if (!(n < static_cast<double>(kMaxSupport))) return kMaxSupport;
    return static_cast<std::size_t>(n);
}

}  // namespace

YpirParams YpirParams::for_site(const SiteConfig& cfg, Site i) {
    if (i == cfg.i_star()) return {cfg.s(), 0.0, 0.0};
    return {cfg.s(), cfg.rho(i), cfg.resetting_rate(i)};
}

double IntDistribution::mass() const {
    double sum = 0.0;
    for (double v : p) sum += v;
    return sum;
}

double IntDistribution::pgf(double x) const {
    double acc = 0.0, pw = 1.0;
    for (double v : p) {
        acc += v * pw;
        pw *= x;
    }
    return acc;
}

double yule_pgf(double s, double t, double x) {
    if (x == 1.0) return 1.0;
    const double e = std::exp(-s * t);
    return e * x / (1.0 - x + e * x);
}

PgfSplit ypir_pgf(const YpirParams& par, int m0, double t, double x, double quad_tol) {
    check(par, m0, t);
    PgfSplit out;
    if (m0 == 0) {
        out.atom0 = std::exp(-par.rho * t);
        out.positive = -std::expm1(-par.rho * t);
        if (par.rho == 0.0) return out;
        out.weighted = quad::adaptive_simpson(
            [&](double u) { return age_density_from_zero(par, t, u) * yule_pgf(par.s, u, x); }, 0.0, t, quad_tol);
        return out;
    }
    out.positive = 1.0;
    out.weighted = std::exp(-par.r * t) * std::pow(yule_pgf(par.s, t, x), m0);
    if (par.r > 0.0)
        out.weighted += quad::adaptive_simpson(
            [&](double u) { return age_density_from_positive(par, u) * yule_pgf(par.s, u, x); }, 0.0, t, quad_tol);
    return out;
}

IntDistribution negative_binomial(int m, double sigma, double tail_tol) {
    if (m < 1 || !(sigma > 0.0) || sigma > 1.0) throw std::invalid_argument("invalid negative binomial parameters");
    IntDistribution out;
    if (sigma == 1.0) {
        out.p.assign(static_cast<std::size_t>(m) + 1, 0.0);
        out.p[static_cast<std::size_t>(m)] = 1.0;
        return out;
    }
    out.p.assign(static_cast<std::size_t>(m), 0.0);
    const double log_q = std::log1p(-sigma);
    double log_v = m * std::log(sigma);
    double cumulative = 0.0;
    for (long n = m;; ++n) {
        const double v = std::exp(log_v);
        out.p.push_back(v);
        cumulative += v;
        // past the mode the remaining tail is bounded by a geometric series
        const double ratio = static_cast<double>(n) / static_cast<double>(n - m + 1) * (1.0 - sigma);
        if (ratio < 1.0 && v * ratio / (1.0 - ratio) < tail_tol) break;
        if (out.p.size() >= kMaxSupport) break;
        log_v += std::log(static_cast<double>(n)) - std::log(static_cast<double>(n - m + 1)) + log_q;
    }
    out.tail_mass = std::max(0.0, 1.0 - cumulative);
    return out;
}

IntDistribution ypir_semigroup(const YpirParams& par, int m0, double t, double quad_tol, double tail_tol) {
    check(par, m0, t);
    IntDistribution out;
    if (t == 0.0) {
        out.p.assign(static_cast<std::size_t>(m0) + 1, 0.0);
        out.p[static_cast<std::size_t>(m0)] = 1.0;
        return out;
    }
    const double sigma_min = std::exp(-par.s * t);
    std::size_t support = geometric_support(sigma_min, tail_tol);

    IntDistribution direct;  // no initiation or reset event before t
    if (m0 >= 1) {
        direct = negative_binomial(m0, sigma_min, tail_tol);
        support = std::max(support, direct.p.size());
    }
    support = std::min(support, kMaxSupport);

    const bool from_zero = (m0 == 0);
    const bool mixes = from_zero ? par.rho > 0.0 : par.r > 0.0;
    std::vector<double> mixture(support, 0.0);
    if (mixes) {
        auto integrand = [&](double u, std::vector<double>& v) {
            const double w = from_zero ? age_density_from_zero(par, t, u) : age_density_from_positive(par, u);
            const double sigma = std::exp(-par.s * u);
            v[0] = 0.0;
            double g = w * sigma;
            for (std::size_t n = 1; n < v.size(); ++n) {
                v[n] = g;
                g *= 1.0 - sigma;
            }
        };
        mixture = quad::adaptive_simpson(integrand, support, 0.0, t, quad_tol);
    }

    out.p.assign(support, 0.0);
    for (std::size_t n = 0; n < support; ++n) out.p[n] = mixture[n];
    if (from_zero) {
        out.p[0] += std::exp(-par.rho * t);
    } else {
        const double weight = std::exp(-par.r * t);
        for (std::size_t n = 0; n < std::min(support, direct.p.size()); ++n) out.p[n] += weight * direct.p[n];
    }
    double total = 0.0;
    for (double& v : out.p) {
        v = std::max(v, 0.0);
        total += v;
    }
    // trim trailing entries that carry nothing
    while (out.p.size() > 1 && out.p.back() < 1e-300) out.p.pop_back();
    out.tail_mass = std::max(0.0, 1.0 - total);
    return out;
}

IntDistribution ypir_stationary(const YpirParams& par, int m0, double tail_tol) {
    if (m0 < 0) throw std::invalid_argument("negative YPIR start state");
    IntDistribution out;
    if (m0 == 0 && par.rho == 0.0) {
        out.p = {1.0};
        return out;
    }
    if (!(par.r > 0.0) || !(par.s > 0.0)) throw std::invalid_argument("stationary law needs r > 0 and s > 0");
    const double alpha = par.r / par.s;
    out.p.push_back(0.0);
    double v = alpha / (1.0 + alpha);
    double cumulative = 0.0;
    for (std::size_t n = 1;; ++n) {
        out.p.push_back(v);
        cumulative += v;
        if (1.0 - cumulative < tail_tol || out.p.size() >= kMaxSupport) break;
        v *= static_cast<double>(n) / (static_cast<double>(n) + 1.0 + alpha);
    }
    out.tail_mass = std::max(0.0, 1.0 - cumulative);
    return out;
}

double yule_law_pgf(double alpha, double x, double tol) {
    if (!(alpha > 0.0)) throw std::invalid_argument("Yule law needs alpha > 0");
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("pgf argument outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double term_p = alpha / (1.0 + alpha);
    double xn = x;
    double sum = 0.0;
    for (long n = 1; n < 100'000'000; ++n) {
        sum += term_p * xn;
        term_p *= static_cast<double>(n) / (static_cast<double>(n) + 1.0 + alpha);
        xn *= x;
        // p is decreasing, so the rest is at most p(n+1) x^{n+1} / (1 - x)
        if (term_p * xn / (1.0 - x) < tol) return sum;
    }
    throw NumericalError("Yule generating function series did not converge");
}

}  // namespace selrec
