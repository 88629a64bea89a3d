// su2.hpp
//
// Complex 2x2 algebra for two-state propagators. Everything here is
// header-only and templated on the real scalar type; the rest of the
// library works with the double-precision aliases at the bottom.

#ifndef QKICK_SU2_HPP
#define QKICK_SU2_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qkick {

template <typename Scalar>
using Matrix2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

template <typename Scalar>
using StateVector = Eigen::Matrix<std::complex<Scalar>, 2, 1>;

template <typename Scalar>
using UnitVector3 = Eigen::Matrix<Scalar, 3, 1>;

using Matrix2d = Matrix2<double>;
using StateVector2d = StateVector<double>;
using UnitVector3d = UnitVector3<double>;

enum class PauliAxis { X, Y, Z };

inline constexpr double kTolUnitary = 1e-10;
inline constexpr double kTolNorm = 1e-10;

inline const char* to_string(PauliAxis axis) {
    switch (axis) {
        case PauliAxis::X: return "x";
        case PauliAxis::Y: return "y";
        case PauliAxis::Z: return "z";
    }
    return "?";
}

template <typename Scalar = double>
Matrix2<Scalar> pauli(PauliAxis axis) {
    using C = std::complex<Scalar>;
    Matrix2<Scalar> m;
    switch (axis) {
        case PauliAxis::X: m << C(0), C(1), C(1), C(0); break;
        case PauliAxis::Y: m << C(0), C(0, -1), C(0, 1), C(0); break;
        case PauliAxis::Z: m << C(1), C(0), C(0), C(-1); break;
    }
    return m;
}

template <typename Derived>
using RealOf = typename Eigen::MatrixBase<Derived>::RealScalar;

/// sigma . u for a real 3-vector (not required to be normalized).
template <typename Derived>
Matrix2<RealOf<Derived>> sigma_dot(const Eigen::MatrixBase<Derived>& u) {
    using Scalar = RealOf<Derived>;
    using C = std::complex<Scalar>;
    return pauli<Scalar>(PauliAxis::X) * C(u(0)) + pauli<Scalar>(PauliAxis::Y) * C(u(1)) +
           pauli<Scalar>(PauliAxis::Z) * C(u(2));
}

/// exp(i phi sigma.u) = cos(phi) I + i sin(phi) sigma.u, for unit u.
template <typename Derived>
Matrix2<RealOf<Derived>> exp_i_phi_sigma_u(RealOf<Derived> phi,
                                           const Eigen::MatrixBase<Derived>& u) {
    using Scalar = RealOf<Derived>;
    using C = std::complex<Scalar>;
    if (!std::isfinite(phi) || !u.allFinite())
        throw std::invalid_argument("exp_i_phi_sigma_u: non-finite input");
    if (std::abs(u.squaredNorm() - Scalar(1)) > Scalar(kTolNorm))
        throw std::invalid_argument("exp_i_phi_sigma_u: axis is not a unit vector");
    return Matrix2<Scalar>::Identity() * C(std::cos(phi)) + sigma_dot(u) * C(0, std::sin(phi));
}

/// Matrix product later * earlier. Argument order follows time ordering.
template <typename A, typename B>
Matrix2<RealOf<A>> compose(const Eigen::MatrixBase<A>& later, const Eigen::MatrixBase<B>& earlier) {
    return later * earlier;
}

template <typename Derived>
Matrix2<RealOf<Derived>> dagger(const Eigen::MatrixBase<Derived>& u) {
    return u.adjoint();
}

template <typename A, typename B>
StateVector<RealOf<A>> apply_propagator(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& s) {
    return u * s;
}

template <typename Scalar>
struct Populations {
    Scalar p1;
    Scalar p2;
};

template <typename Derived>
Populations<RealOf<Derived>> probabilities(const Eigen::MatrixBase<Derived>& s) {
    return {std::norm(s(0)), std::norm(s(1))};
}

template <typename A, typename B>
RealOf<A> max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

/// max |(U^dagger U - I)_ij|
template <typename Derived>
RealOf<Derived> unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
    using Scalar = RealOf<Derived>;
    return (u.adjoint() * u - Matrix2<Scalar>::Identity()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, RealOf<Derived> tol = kTolUnitary) {
    using Scalar = RealOf<Derived>;
    const Matrix2<Scalar> m = u;
    return unitarity_defect(m) <= tol && std::abs(std::abs(m.determinant()) - Scalar(1)) <= tol;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& h, RealOf<Derived> tol) {
    return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Coefficients (cx, cy, cz) of the Pauli expansion of the traceless
/// Hermitian part of g: g = (tr g / 2) I + cx sx + cy sy + cz sz.
template <typename Derived>
UnitVector3<RealOf<Derived>> pauli_coefficients(const Eigen::MatrixBase<Derived>& g) {
    using Scalar = RealOf<Derived>;
    const Matrix2<Scalar> h = (g + g.adjoint()) * std::complex<Scalar>(0.5);
    return UnitVector3<Scalar>(h(0, 1).real(), -h(0, 1).imag(),
                               Scalar(0.5) * (h(0, 0).real() - h(1, 1).real()));
}

/// exp(-i g) for a traceless Hermitian generator g (e.g. an integrated
/// Hamiltonian). Writes g = c sigma.u and evaluates the closed form.
template <typename Derived>
Matrix2<RealOf<Derived>> exp_minus_i_generator(const Eigen::MatrixBase<Derived>& g) {
    using Scalar = RealOf<Derived>;
    const UnitVector3<Scalar> coeffs = pauli_coefficients(g);
    const Scalar c = coeffs.norm();
    if (c == Scalar(0))
        return Matrix2<Scalar>::Identity();
    return exp_i_phi_sigma_u(-c, (coeffs / c).eval());
}

}  // namespace qkick

#endif  // QKICK_SU2_HPP
