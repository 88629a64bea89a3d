// propagators.hpp
//
// Closed-form interaction-picture propagators for kicked qubits, the
// no-time-ordering (NTO) propagator exp(-i * integral of H), and the
// conversion between pictures.

#ifndef QKICK_PROPAGATORS_HPP
#define QKICK_PROPAGATORS_HPP

#include "qkick/pulses.hpp"
#include "qkick/su2.hpp"

#include <span>

namespace qkick {

/// A delta kick restricted to the transverse axes.
struct KickSpec {
    double alpha = 0.0;
    double t_k = 0.0;
    PauliAxis axis = PauliAxis::X;
};

/// exp(-i alpha sigma_axis(t_k)) in the interaction picture; for axis X
///   [[cos a, -i e^{-i dE t_k} sin a], [-i e^{i dE t_k} sin a, cos a]].
/// Independent of the observation time. Axis Z throws.
Matrix2d single_kick(double delta_e, const KickSpec& k);

/// Time-ordered product of single kicks, later kicks on the left. Kicks
/// sharing a time are merged by summing their generators. Throws if the
/// list is not sorted by t_k.
Matrix2d kick_sequence(double delta_e, std::span<const KickSpec> kicks);

/// +alpha kick at t1 followed by -alpha at t2 (both sigma_x), closed form.
/// Requires t2 >= t1.
Matrix2d opposite_kick_pair(double delta_e, double alpha, double t1, double t2);

/// The same closed form written in t_minus = t2 - t1 and t_plus = t1 + t2,
/// without the ordering precondition (used for reversal identities).
Matrix2d opposite_kick_pair_closed_form(double delta_e, double alpha, double t_minus,
                                        double t_plus);

/// exp(-i * integral over [t0, tf] of the coupling), plus the H0 term in the
/// Schrodinger picture.
Matrix2d nto_propagator(const Schedule& s, Representation rep);

/// NTO propagator of the +/-alpha pair, closed form:
///   [[cos x, e^{-i p} sin x], [-e^{i p} sin x, cos x]],
///   x = 2 alpha sin(dE t_minus / 2), p = off_diagonal_phase.
/// The four-argument overload uses p = dE (t1 + t2) / 2, which is the
/// phase produced by nto_propagator for the same schedule.
Matrix2d nto_opposite_pair(double delta_e, double alpha, double t1, double t2);
Matrix2d nto_opposite_pair(double delta_e, double alpha, double t1, double t2,
                           double off_diagonal_phase);

/// Converts a propagator from t0 to t into the `to` picture, assuming it
/// is currently in the other one:
///   U_S = exp(-i H0 t) U_I exp(i H0 t0),   U_I = exp(i H0 t) U_S exp(-i H0 t0).
Matrix2d change_representation(const Matrix2d& u, double delta_e, double t, double t0,
                               Representation to);

}  // namespace qkick

#endif  // QKICK_PROPAGATORS_HPP
