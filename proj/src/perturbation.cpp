#include "qkick/perturbation.hpp"

#include "qkick/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qkick {

namespace {

using C = std::complex<double>;

struct WeightedKick {
    double t;
    Matrix2d v;  // alpha * rotated sigma
};

void require_single_kind(const Schedule& s) {
    if (s.has_kicks() && s.has_smooth_pulses())
        throw std::invalid_argument(
            "second-order expansion needs either all kicks or all smooth pulses");
}

std::vector<WeightedKick> kicks_in_window(const Schedule& s) {
    std::vector<WeightedKick> out;
    for (const auto& p : s.pulses()) {
        const auto& k = std::get<DeltaKick>(p);
        if (k.t_k < s.t0() || k.t_k > s.tf())
            continue;
        out.push_back({k.t_k, rotated_pauli(k.axis, s.delta_e(), k.t_k) * k.alpha});
    }
    return out;
}

/// Theta(ta - tb) with Theta(0) = 1/2.
double step_weight(double ta, double tb) {
    if (ta > tb)
        return 1.0;
    if (ta < tb)
        return 0.0;
    return 0.5;
}

double sign_weight(double ta, double tb) {
    return ta > tb ? 1.0 : (ta < tb ? -1.0 : 0.0);
}

// Outer integral over the smooth-support segments of [t0, tf].
template <typename F>
Matrix2d outer_integral(const Schedule& s, const F& integrand, double abs_tol) {
    const auto segments = smooth_support_segments(s, s.t0(), s.tf());
    Matrix2d total = Matrix2d::Zero();
    const double tol = abs_tol / static_cast<double>(std::max<std::size_t>(1, segments.size()));
    for (const auto& [lo, hi] : segments)
        total += adaptive_simpson(integrand, lo, hi, {.abs_tol = tol});
    return total;
}

Matrix2d inner_integral(const Schedule& s, double a, double b, double abs_tol) {
    return integrated_coupling(s, Representation::Interaction, a, b, abs_tol);
}

}  // namespace

double SecondOrderBreakdown::identity_residual() const {
    return (second_ordered - second_nto - commutator_correction).cwiseAbs().maxCoeff();
}

SecondOrderBreakdown dyson_second_order(const Schedule& s, NestedQuadratureOptions opt) {
    require_single_kind(s);
    SecondOrderBreakdown b;

    if (s.has_kicks()) {
        const auto kicks = kicks_in_window(s);
        Matrix2d total = Matrix2d::Zero();
        for (const auto& ka : kicks) {
            total += ka.v;
            for (const auto& kb : kicks) {
                const double w = step_weight(ka.t, kb.t);
                if (w == 0.0)
                    continue;
                b.second_ordered -= (ka.v * kb.v) * w;
                b.commutator_correction -= (ka.v * kb.v - kb.v * ka.v) * (0.5 * w);
            }
        }
        b.first = total * C(0.0, -1.0);
        b.second_nto = (total * total) * -0.5;
        return b;
    }

    const double tol = opt.abs_tol;
    const Matrix2d total = inner_integral(s, s.t0(), s.tf(), tol);
    b.first = total * C(0.0, -1.0);
    b.second_nto = (total * total) * -0.5;
    if (!s.has_smooth_pulses())
        return b;

    b.second_ordered = -outer_integral(
        s,
        [&](double t1) -> Matrix2d {
            return interaction_potential(s, t1) * inner_integral(s, s.t0(), t1, tol);
        },
        tol);
    b.commutator_correction = -0.5 * outer_integral(
                                         s,
                                         [&](double t1) -> Matrix2d {
                                             const Matrix2d v1 = interaction_potential(s, t1);
                                             const Matrix2d w = inner_integral(s, s.t0(), t1, tol);
                                             return v1 * w - w * v1;
                                         },
                                         tol);
    return b;
}

ThetaWeights theta_split_weights(double t1, double t2) {
    if (t1 == t2)
        throw std::invalid_argument("theta_split_weights: t1 == t2 (measure zero)");
    return {0.5, t1 > t2 ? 0.5 : -0.5};
}

ThetaSplitIntegrals theta_split_second_order(const Schedule& s, NestedQuadratureOptions opt) {
    require_single_kind(s);
    ThetaSplitIntegrals r{Matrix2d::Zero(), Matrix2d::Zero()};

    if (s.has_kicks()) {
        const auto kicks = kicks_in_window(s);
        for (const auto& ka : kicks)
            for (const auto& kb : kicks) {
                const Matrix2d prod = ka.v * kb.v;
                r.average_part -= prod * 0.5;
                r.ordering_part -= prod * (0.5 * sign_weight(ka.t, kb.t));
            }
        return r;
    }
    if (!s.has_smooth_pulses())
        return r;

    const double tol = opt.abs_tol;
    r.average_part = -0.5 * outer_integral(
                                s,
                                [&](double t1) -> Matrix2d {
                                    return interaction_potential(s, t1) *
                                           inner_integral(s, s.t0(), s.tf(), tol);
                                },
                                tol);
    // sgn(t1 - t2) is +1 below the diagonal and -1 above; the inner
    // integral is split at t1 so each piece is smooth.
    r.ordering_part = -0.5 * outer_integral(
                                 s,
                                 [&](double t1) -> Matrix2d {
                                     const Matrix2d below = inner_integral(s, s.t0(), t1, tol);
                                     const Matrix2d above = inner_integral(s, t1, s.tf(), tol);
                                     return interaction_potential(s, t1) * (below - above);
                                 },
                                 tol);
    return r;
}

PhaseOrthogonality phase_orthogonality_check(const Schedule& s, NestedQuadratureOptions opt) {
    const Matrix2d corr = dyson_second_order(s, opt).commutator_correction;
    return {std::max(std::abs(corr(0, 1)), std::abs(corr(1, 0))),
            std::max(std::abs(corr(0, 0).real()), std::abs(corr(1, 1).real()))};
}

}  // namespace qkick
