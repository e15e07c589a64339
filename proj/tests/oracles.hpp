// Reference implementations for the tests. They work on full-sequence
// patterns (bit i-1 = letter at site i) with plain loops and share no code
// with the library beyond the RNG stream.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "selrec/measure.hpp"
#include "selrec/rng.hpp"

namespace oracle {

using Vec = std::vector<double>;

struct Model {
    int n;
    int i_star;
    double s;
    std::vector<double> rho;  // rho[i - 1]
};

inline bool precedes(const Model& m, int i, int j) {
    return (m.i_star <= i && i <= j) || (m.i_star >= i && i >= j);
}

inline std::uint32_t tail_mask(const Model& m, int i) {
    std::uint32_t out = 0;
    for (int j = 1; j <= m.n; ++j)
        if (precedes(m, i, j)) out |= 1u << (j - 1);
    return out;
}

inline std::uint32_t full_mask(int n) { return (1u << n) - 1u; }

/// Marginal on the sites of `mask`, indexed by the masked full pattern.
inline Vec marginal(const Vec& w, std::uint32_t mask) {
    Vec out(w.size(), 0.0);
    for (std::uint32_t x = 0; x < w.size(); ++x) out[x & mask] += w[x];
    return out;
}

inline double fit(const Model& m, const Vec& w) {
    double f = 0.0;
    for (std::uint32_t x = 0; x < w.size(); ++x)
        if (!((x >> (m.i_star - 1)) & 1u)) f += w[x];
    return f;
}

// Written homogeneous in the total mass so that long integrations do not
// drift off the simplex (M = 1 is unstable for the quadratic terms).
inline Vec rhs(const Model& m, const Vec& w) {
    Vec out(w.size(), 0.0);
    double mass = 0.0;
    for (double v : w) mass += v;
    const double f = fit(m, w) / mass;
    for (std::uint32_t x = 0; x < w.size(); ++x) {
        const bool is_fit = !((x >> (m.i_star - 1)) & 1u);
        out[x] += m.s * ((is_fit ? w[x] : 0.0) - f * w[x]);
    }
    for (int i = 1; i <= m.n; ++i) {
        if (i == m.i_star || m.rho[i - 1] == 0.0) continue;
        const std::uint32_t d = tail_mask(m, i), c = full_mask(m.n) & ~d;
        const Vec mc = marginal(w, c), md = marginal(w, d);
        for (std::uint32_t x = 0; x < w.size(); ++x) out[x] += m.rho[i - 1] * (mc[x & c] * md[x & d] / mass - w[x]);
    }
    return out;
}

/// Dormand-Prince 5(4) with tight error control.
inline Vec solve(const Model& m, Vec w, double t, double tol = 1e-13) {
    if (t == 0.0) return w;
    namespace ode = boost::numeric::odeint;
    auto system = [&](const Vec& y, Vec& dy, double) { dy = rhs(m, y); };
    ode::integrate_adaptive(ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<Vec>()), system, w, 0.0, t,
                            1e-3);
    return w;
}

/// Solution with selection only, by the logistic formula for the fit
/// fraction applied pattern by pattern.
inline Vec selection_only(const Model& m, const Vec& w, double t) {
    const double f = fit(m, w);
    const double ft = f * std::exp(m.s * t) / (f * std::exp(m.s * t) + 1.0 - f);
    Vec out(w.size());
    for (std::uint32_t x = 0; x < w.size(); ++x) {
        const bool is_fit = !((x >> (m.i_star - 1)) & 1u);
        out[x] = is_fit ? (f > 0 ? w[x] * ft / f : 0.0) : (f < 1 ? w[x] * (1 - ft) / (1 - f) : 0.0);
    }
    return out;
}

inline double l1(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d += std::abs(a[k] - b[k]);
    return d;
}

/// theta with 1 - f(phi_theta) = (1 - f0)^k, found by bisection on the
/// logistic solution.
inline double theta_bisection(double s, double f0, long k) {
    const double target = std::pow(1.0 - f0, static_cast<double>(k));
    auto unfit = [&](double th) {
        const double e = std::exp(s * th);
        return (1.0 - f0) / (f0 * e + 1.0 - f0);
    };
    double lo = 0.0, hi = 1.0;
    while (unfit(hi) > target) hi *= 2.0;
    for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (unfit(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Block of a weighted partition as (first, last, weight).
struct Block {
    int first, last;
    long weight;
    auto operator<=>(const Block&) const = default;
};

/// Direct event loop of the weighted partitioning process: every block
/// branches at rate s * weight; for each crossover site i, a block meeting
/// both head and tail splits (head keeps the weight, tail restarts at 1) and
/// a block inside the tail restarts at weight 1.
inline std::vector<Block> wpp_direct(const Model& m, std::vector<Block> blocks, double t, selrec::RngStream& rng) {
    auto mask_of = [](const Block& b) {
        std::uint32_t out = 0;
        for (int i = b.first; i <= b.last; ++i) out |= 1u << (i - 1);
        return out;
    };
    double clock = 0.0;
    while (true) {
        struct Event {
            std::size_t block;
            int kind;  // 0 branch, 1 split, 2 reset
            int site;
            double rate;
        };
        std::vector<Event> events;
        double total = 0.0;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const std::uint32_t a = mask_of(blocks[k]);
            if (m.s > 0) events.push_back({k, 0, 0, m.s * static_cast<double>(blocks[k].weight)});
            for (int i = 1; i <= m.n; ++i) {
                if (i == m.i_star || m.rho[i - 1] == 0.0) continue;
                const std::uint32_t d = tail_mask(m, i);
                if ((a & d) == a)
                    events.push_back({k, 2, i, m.rho[i - 1]});
                else if (a & d)
                    events.push_back({k, 1, i, m.rho[i - 1]});
            }
        }
        for (const Event& e : events) total += e.rate;
        if (total == 0.0) break;
        clock += rng.exponential(total);
        if (clock > t) break;
        double u = rng.uniform() * total;
        std::size_t pick = 0;
        while (pick + 1 < events.size() && u >= events[pick].rate) u -= events[pick++].rate;
        const Event e = events[pick];
        Block& b = blocks[e.block];
        if (e.kind == 0) {
            ++b.weight;
        } else if (e.kind == 2) {
            b.weight = 1;
        } else {
            // tail is the part on the far side of site e.site from i*
            Block head = b, tail = b;
            if (e.site > m.i_star) {
                head.last = e.site - 1;
                tail.first = e.site;
            } else {
                head.first = e.site + 1;
                tail.last = e.site;
            }
            tail.weight = 1;
            b = head;
            blocks.push_back(tail);
        }
    }
    std::sort(blocks.begin(), blocks.end());
    return blocks;
}

/// Random probability vector on 2^n types (flat Dirichlet).
inline Vec random_probability(int n, std::mt19937_64& gen) {
    std::exponential_distribution<double> e(1.0);
    Vec w(std::size_t{1} << n);
    double total = 0.0;
    for (double& v : w) total += v = e(gen);
    for (double& v : w) v /= total;
    return w;
}

inline selrec::Measure as_measure(int n, const Vec& w) { return selrec::Measure(selrec::SiteSet::all(n), w); }

}  // namespace oracle
