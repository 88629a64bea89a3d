// quadrature.hpp
//
// Adaptive Simpson quadrature with interval bisection. Works for scalar
// and Eigen-valued integrands; the error test uses the max-entry norm.

#ifndef QKICK_QUADRATURE_HPP
#define QKICK_QUADRATURE_HPP

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <type_traits>

namespace qkick {

inline constexpr double kTolQuad = 1e-10;

namespace detail {

inline double quad_norm(double x) { return std::abs(x); }
inline double quad_norm(const std::complex<double>& x) { return std::abs(x); }

template <typename Derived>
double quad_norm(const Eigen::MatrixBase<Derived>& m) {
    return m.cwiseAbs().maxCoeff();
}

template <typename F, typename T>
T simpson_refine(const F& f, double a, double b, const T& fa, const T& fm, const T& fb,
                 const T& whole, double tol, int depth, int min_depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const T flm = f(lm);
    const T frm = f(rm);
    const T left = (fa + 4.0 * flm + fm) * ((m - a) / 6.0);
    const T right = (fm + 4.0 * frm + fb) * ((b - m) / 6.0);
    const T delta = left + right - whole;
    if (depth <= 0 || (min_depth <= 0 && quad_norm(delta) <= 15.0 * tol))
        return T(left + right + delta / 15.0);
    return T(simpson_refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, min_depth - 1) +
             simpson_refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, min_depth - 1));
}

}  // namespace detail

struct SimpsonOptions {
    double abs_tol = kTolQuad;
    int max_depth = 48;
    // Forced bisections before the error test is trusted; guards against
    // accepting a coarse estimate on narrow peaks.
    int min_depth = 4;
};

/// Integral of f over [a, b] (a <= b assumed; a == b gives zero).
template <typename F>
auto adaptive_simpson(const F& f, double a, double b, SimpsonOptions opt = {}) {
    using T = std::decay_t<std::invoke_result_t<const F&, double>>;
    const T fa = f(a);
    if (!(b > a))
        return T(fa * 0.0);
    const T fb = f(b);
    const T fm = f(0.5 * (a + b));
    const T whole = (fa + 4.0 * fm + fb) * ((b - a) / 6.0);
    return detail::simpson_refine(f, a, b, fa, fm, fb, whole, opt.abs_tol, opt.max_depth,
                                  opt.min_depth);
}

}  // namespace qkick

#endif  // QKICK_QUADRATURE_HPP
