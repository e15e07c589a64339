#include "selrec/quadrature.hpp"

#include <string>

namespace selrec::quad {

namespace {

struct ScalarSimpson {
    const std::function<double(double)>& f;
    int max_depth;

    double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
        if (depth >= max_depth)
            throw NumericalError("adaptive Simpson did not converge on [" + std::to_string(a) + ", " +
                                 std::to_string(b) + "]");
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
};

using VecFn = std::function<void(double, std::vector<double>&)>;

struct VectorSimpson {
    const VecFn& f;
    std::size_t dim;
    int max_depth;

    void recurse(double a, double b, const std::vector<double>& fa, const std::vector<double>& fm,
                 const std::vector<double>& fb, const std::vector<double>& whole, double tol, int depth,
                 std::vector<double>& acc) const {
        const double m = 0.5 * (a + b);
        std::vector<double> flm(dim), frm(dim), left(dim), right(dim);
        f(0.5 * (a + m), flm);
        f(0.5 * (m + b), frm);
        double err = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            left[k] = (m - a) / 6.0 * (fa[k] + 4.0 * flm[k] + fm[k]);
            right[k] = (b - m) / 6.0 * (fm[k] + 4.0 * frm[k] + fb[k]);
            err += std::abs(left[k] + right[k] - whole[k]);
        }
        if (err <= 15.0 * tol) {
            for (std::size_t k = 0; k < dim; ++k) {
                const double delta = left[k] + right[k] - whole[k];
                acc[k] += left[k] + right[k] + delta / 15.0;
            }
            return;
        }
        if (depth >= max_depth) throw NumericalError("vector adaptive Simpson did not converge");
        recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, acc);
        recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, acc);
    }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
    if (b == a) return 0.0;
    // Split once up front so a narrow feature at the midpoint cannot fool the first estimate.
    const double m = 0.5 * (a + b);
    double total = 0.0;
    for (auto [lo, hi] : {std::pair{a, m}, std::pair{m, b}}) {
        const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += ScalarSimpson{f, max_depth}.recurse(lo, hi, fa, fm, fb, whole, 0.5 * tol, 0);
    }
    return total;
}

std::vector<double> adaptive_simpson(const VecFn& f, std::size_t dim, double a, double b, double tol,
                                     int max_depth) {
    std::vector<double> acc(dim, 0.0);
    if (b == a) return acc;
    const double m = 0.5 * (a + b);
    for (auto [lo, hi] : {std::pair{a, m}, std::pair{m, b}}) {
        std::vector<double> fa(dim), fm(dim), fb(dim), whole(dim);
        f(lo, fa);
        f(0.5 * (lo + hi), fm);
        f(hi, fb);
        for (std::size_t k = 0; k < dim; ++k) whole[k] = (hi - lo) / 6.0 * (fa[k] + 4.0 * fm[k] + fb[k]);
        VectorSimpson{f, dim, max_depth}.recurse(lo, hi, fa, fm, fb, whole, 0.5 * tol, 0, acc);
    }
    return acc;
}

}  // namespace selrec::quad
