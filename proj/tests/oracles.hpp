// Test-only reference computations. Nothing here calls the closed forms
// under test; each routine takes the long way round.

#ifndef QKICK_TESTS_ORACLES_HPP
#define QKICK_TESTS_ORACLES_HPP

#include "qkick/su2.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace qkick::oracle {

/// exp(a) by a truncated Taylor series.
inline Matrix2d taylor_exp(const Matrix2d& a, int terms = 16) {
    Matrix2d sum = Matrix2d::Identity();
    Matrix2d term = Matrix2d::Identity();
    for (int n = 1; n < terms; ++n) {
        term = term * a / std::complex<double>(n);
        sum += term;
    }
    return sum;
}

/// exp(a) by scaling and squaring around a long Taylor series; accurate
/// for generators of any size.
inline Matrix2d expm(const Matrix2d& a) {
    const double norm = a.cwiseAbs().maxCoeff();
    int squarings = 0;
    while (norm / std::pow(2.0, squarings) > 0.25)
        ++squarings;
    Matrix2d e = taylor_exp(a / std::complex<double>(std::pow(2.0, squarings)), 24);
    for (int i = 0; i < squarings; ++i)
        e = e * e;
    return e;
}

/// exp(i H0 t) with H0 = -(dE / 2) sigma_z, built from the generator.
inline Matrix2d rotate_frame(double delta_e, double t) {
    Matrix2d h0 = Matrix2d::Zero();
    h0(0, 0) = -0.5 * delta_e;
    h0(1, 1) = 0.5 * delta_e;
    return expm(h0 * std::complex<double>(0.0, t));
}

/// Kick in the interaction picture from its definition:
/// exp(-i alpha exp(i H0 t) sigma exp(-i H0 t)).
inline Matrix2d kick_by_definition(double delta_e, double alpha, double t, const Matrix2d& sigma) {
    const Matrix2d r = rotate_frame(delta_e, t);
    const Matrix2d v = r * sigma * r.adjoint();
    return expm(v * std::complex<double>(0.0, -alpha));
}

/// Haar-ish random unitary from a random Hermitian generator.
inline Matrix2d random_unitary(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix2d h;
    h(0, 0) = n(rng);
    h(1, 1) = n(rng);
    h(0, 1) = {n(rng), n(rng)};
    h(1, 0) = std::conj(h(0, 1));
    return expm(h * std::complex<double>(0.0, 1.0));
}

inline StateVector2d random_state(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    StateVector2d s{{n(rng), n(rng)}, {n(rng), n(rng)}};
    return s / s.norm();
}

}  // namespace qkick::oracle

#endif  // QKICK_TESTS_ORACLES_HPP
