// pulses.hpp
//
// External-field pulses, schedules, and the coupling they produce in the
// Schrodinger and interaction pictures. Units: hbar = 1, so delta_e * t is
// a phase. The free Hamiltonian is H0 = -(delta_e / 2) sigma_z and the
// interaction picture uses exp(+i H0 t) V exp(-i H0 t).

#ifndef QKICK_PULSES_HPP
#define QKICK_PULSES_HPP

#include "qkick/su2.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qkick {

/// Gaussian pulses are treated as zero outside center +/- this many widths.
inline constexpr double kGaussianSupportWidths = 6.0;

struct DeltaKick {
    double alpha = 0.0;  ///< integrated strength (radians)
    double t_k = 0.0;
    PauliAxis axis = PauliAxis::X;
};

/// V(t) = alpha / (sqrt(pi) tau) exp(-(t - t_k)^2 / tau^2)
struct GaussianPulse {
    double alpha = 0.0;
    double t_k = 0.0;
    double tau = 1.0;
    PauliAxis axis = PauliAxis::X;
};

/// V(t) = alpha / tau on [t_start, t_start + tau]
struct RectangularPulse {
    double alpha = 0.0;
    double t_start = 0.0;
    double tau = 1.0;
    PauliAxis axis = PauliAxis::X;
};

using Pulse = std::variant<DeltaKick, GaussianPulse, RectangularPulse>;

enum class Representation { Schrodinger, Interaction };

const char* to_string(Representation rep);

/// Throws std::invalid_argument on non-finite fields, tau <= 0 or a
/// sigma_z coupling.
void validate(const Pulse& p);

bool is_kick(const Pulse& p);
double strength(const Pulse& p);
PauliAxis axis_of(const Pulse& p);
/// Sort key: kick time, Gaussian center or rectangle start.
double anchor_time(const Pulse& p);
/// Closed interval outside which the pulse is treated as zero.
std::pair<double, double> support(const Pulse& p);

/// Field amplitude V(t). Throws std::domain_error for a DeltaKick.
double value_at(const Pulse& p, double t);

/// Integral of V over [t0, t]; closed forms. Kicks count when
/// t0 <= t_k <= t. Infinite limits are accepted.
double integrated_strength(const Pulse& p, double t0, double t);

/// Level splitting, pulse list and time window. Immutable once built;
/// the pulse list is kept sorted by anchor time (stable for ties).
class Schedule {
public:
    Schedule(double delta_e, std::vector<Pulse> pulses, double t0, double tf);

    double delta_e() const { return delta_e_; }
    double t0() const { return t0_; }
    double tf() const { return tf_; }
    double duration() const { return tf_ - t0_; }
    const std::vector<Pulse>& pulses() const { return pulses_; }

    bool has_kicks() const;
    bool has_smooth_pulses() const;

    /// Same pulses over a different window.
    Schedule with_window(double t0, double tf) const;

    /// Pulses whose support sticks out of [t0, tf]. Not fatal.
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    double delta_e_;
    std::vector<Pulse> pulses_;
    double t0_;
    double tf_;
    std::vector<std::string> warnings_;
};

/// exp(+i H0 t) sigma_axis exp(-i H0 t).
Matrix2d rotated_pauli(PauliAxis axis, double delta_e, double t);

/// exp(-i H0 t) = diag(exp(i delta_e t / 2), exp(-i delta_e t / 2)).
Matrix2d free_propagator(double delta_e, double t);

/// -(delta_e / 2) sigma_z
Matrix2d free_hamiltonian(double delta_e);

Matrix2d schrodinger_hamiltonian(const Schedule& s, double t);
Matrix2d interaction_potential(const Schedule& s, double t);

/// Coupling in the requested picture at time t (no H0 term). Kicks throw.
Matrix2d coupling(const Schedule& s, Representation rep, double t);

/// Integral of the coupling over [a, b]. Kicks contribute
/// alpha * sigma (rotated to t_k in the interaction picture). Smooth
/// pulses use the closed-form strength in the Schrodinger picture and
/// adaptive quadrature over their supports in the interaction picture.
Matrix2d integrated_coupling(const Schedule& s, Representation rep, double a, double b,
                             double abs_tol = 1e-12);

/// Time average of the coupling over [t0, tf] of the schedule.
Matrix2d time_average(const Schedule& s, Representation rep);

/// Sorted, disjoint sub-intervals of [a, b] covering every smooth pulse
/// support. Outside these the smooth coupling is zero.
std::vector<std::pair<double, double>> smooth_support_segments(const Schedule& s, double a,
                                                               double b);

}  // namespace qkick

#endif  // QKICK_PULSES_HPP
