// perturbation.hpp
//
// Second-order Dyson expansion of the interaction-picture propagator and
// its split into an unordered (time-averaged) part and an ordering part:
//
//   U ~ I - i int V - int_{t2 < t1} V(t1) V(t2)
//   V(t1) V(t2) = 1/2 {V(t1), V(t2)} + 1/2 [V(t1), V(t2)]
//
// so the ordered second-order term equals -1/2 (int V)^2 plus the ordered
// commutator integral -1/2 int_{t2 < t1} [V(t1), V(t2)].

#ifndef QKICK_PERTURBATION_HPP
#define QKICK_PERTURBATION_HPP

#include "qkick/pulses.hpp"
#include "qkick/su2.hpp"

namespace qkick {

/// Tolerance of the central identity on the quadrature path.
inline constexpr double kTolQuad2 = 1e-8;
/// Tolerance of the central identity on the kick (finite sum) path.
inline constexpr double kTolKickSums = 1e-13;

struct SecondOrderBreakdown {
    Matrix2d zeroth = Matrix2d::Identity();
    Matrix2d first = Matrix2d::Zero();           ///< -i int V
    Matrix2d second_ordered = Matrix2d::Zero();  ///< -int_{t2<t1} V(t1) V(t2)
    Matrix2d second_nto = Matrix2d::Zero();      ///< -1/2 (int V)^2
    Matrix2d commutator_correction = Matrix2d::Zero();  ///< -1/2 int_{t2<t1} [V(t1), V(t2)]

    /// I + first + second_ordered
    Matrix2d truncated_propagator() const { return zeroth + first + second_ordered; }
    /// max |second_ordered - second_nto - commutator_correction|
    double identity_residual() const;
};

struct NestedQuadratureOptions {
    double abs_tol = 1e-9;  ///< per entry, outer and inner integrals
};

/// All terms through second order, interaction picture. Smooth schedules
/// use nested adaptive Simpson over the ordered simplex; kick schedules
/// use exact ordered sums (coincident kicks, including a kick with itself,
/// carry weight 1/2). Mixed schedules throw std::invalid_argument.
SecondOrderBreakdown dyson_second_order(const Schedule& s, NestedQuadratureOptions opt = {});

struct ThetaWeights {
    double average;   ///< always 1/2
    double ordering;  ///< sgn(t1 - t2) / 2
};

/// Theta(t1 - t2) = 1/2 + sgn(t1 - t2) / 2. Throws for t1 == t2.
ThetaWeights theta_split_weights(double t1, double t2);

struct ThetaSplitIntegrals {
    Matrix2d average_part;   ///< -int int_{square} 1/2 V(t1) V(t2)
    Matrix2d ordering_part;  ///< -int int_{square} sgn(t1 - t2)/2 V(t1) V(t2)
};

/// The ordered second-order term recomputed over the full square with the
/// theta split. average_part reproduces second_nto and ordering_part the
/// commutator correction, by a route independent of dyson_second_order.
ThetaSplitIntegrals theta_split_second_order(const Schedule& s,
                                             NestedQuadratureOptions opt = {});

struct PhaseOrthogonality {
    double max_offdiag_of_correction;
    double max_real_diag_of_correction;
};

/// For sigma_x-coupled schedules the commutator correction is diagonal and
/// purely imaginary; reports the size of the components that should
/// vanish. Other couplings are reported without a verdict.
PhaseOrthogonality phase_orthogonality_check(const Schedule& s,
                                             NestedQuadratureOptions opt = {});

}  // namespace qkick

#endif  // QKICK_PERTURBATION_HPP
