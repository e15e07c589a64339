#pragma once

#include <cstddef>
#include <vector>

#include "selrec/ypir.hpp"

namespace selrec {

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t bins = 0;
};

/// Pearson goodness-of-fit of integer samples against `law`. Consecutive
/// values are pooled until each bin expects at least `min_expected` counts;
/// the last bin also takes every value beyond the stored support.
ChiSquareResult chi_square_test(const std::vector<long>& samples, const IntDistribution& law,
                                double min_expected = 5.0);

/// Upper tail of the chi-square distribution.
double chi_square_survival(double statistic, int dof);

}  // namespace selrec
