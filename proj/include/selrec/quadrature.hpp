#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "selrec/errors.hpp"

namespace selrec::quad {

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 40);

/// Adaptive Simpson for a vector-valued integrand of fixed length; the
/// error is measured in the l1 norm of the vector.
std::vector<double> adaptive_simpson(const std::function<void(double, std::vector<double>&)>& f,
                                     std::size_t dim, double a, double b, double tol, int max_depth = 40);

}  // namespace selrec::quad
