#include "selrec/stats.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace selrec {

double chi_square_survival(double statistic, int dof) {
    if (dof < 1) throw std::invalid_argument("chi-square needs at least one degree of freedom");
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, std::max(statistic, 0.0)));
}

ChiSquareResult chi_square_test(const std::vector<long>& samples, const IntDistribution& law, double min_expected) {
    if (samples.empty()) throw std::invalid_argument("no samples");
    const double total = static_cast<double>(samples.size());
    const std::size_t support = law.p.size();

    std::vector<double> counts(support + 1, 0.0);  // last slot: beyond the support
    for (long v : samples) {
        if (v < 0) throw std::invalid_argument("negative sample");
        counts[std::min(static_cast<std::size_t>(v), support)] += 1.0;
    }
    double stored = 0.0;
    for (double p : law.p) stored += p;

    // bins as [first value, one past last value)
    struct Bin {
        double observed = 0.0, expected = 0.0;
    };
    std::vector<Bin> bins;
    Bin cur;
    for (std::size_t k = 0; k < support; ++k) {
        cur.observed += counts[k];
        cur.expected += total * law.p[k];
        if (cur.expected >= min_expected) {
            bins.push_back(cur);
            cur = Bin{};
        }
    }
    cur.observed += counts[support];
    cur.expected += total * std::max(0.0, 1.0 - stored);
    if (cur.expected >= min_expected || bins.empty()) {
        bins.push_back(cur);
    } else {
        bins.back().observed += cur.observed;
        bins.back().expected += cur.expected;
    }

    ChiSquareResult out;
    out.bins = bins.size();
    for (const Bin& b : bins) {
        if (b.expected > 0.0) {
            const double diff = b.observed - b.expected;
            out.statistic += diff * diff / b.expected;
        } else if (b.observed > 0.0) {
            out.statistic = std::numeric_limits<double>::infinity();
        }
    }
    out.dof = static_cast<int>(bins.size()) - 1;
    out.p_value = out.dof >= 1 ? chi_square_survival(out.statistic, out.dof) : 1.0;
    return out;
}

}  // namespace selrec
