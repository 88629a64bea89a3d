// ode_engine.hpp
//
// Fixed-step classical RK4 for i da/dt = H(t) a with finite-width pulses.

#ifndef QKICK_ODE_ENGINE_HPP
#define QKICK_ODE_ENGINE_HPP

#include "qkick/pulses.hpp"
#include "qkick/su2.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace qkick {

struct IntegratorConfig {
    double dt = 0.0;
    Representation representation = Representation::Interaction;
    int record_every = 1;
};

/// dt = min(tau_min / 40, T_dE / 400) with T_dE = 2 pi / |dE|. Falls back
/// to duration / 400 when the schedule has neither a width nor a splitting.
IntegratorConfig default_config(const Schedule& s, Representation rep);

/// Largest dt that resolves the pulse and Rabi scales:
/// min(tau_min / 20, T_dE / 200). Larger steps produce a warning.
double step_warning_threshold(const Schedule& s);

inline constexpr std::int64_t kMaxSteps = 1'000'000'000;

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector2d> states;
    Matrix2d final_propagator = Matrix2d::Identity();
    std::int64_t steps = 0;

    const StateVector2d& final_state() const { return states.back(); }
    /// |1 - (P1 + P2)| of the final state.
    double norm_drift() const;
};

/// Integrates from t0 to tf in ceil(duration / dt) equal steps, so the
/// effective step is at most cfg.dt. Throws std::domain_error if the
/// schedule holds kicks, std::invalid_argument on a bad config or an
/// unnormalized initial state, std::length_error above kMaxSteps.
Trajectory evolve(const Schedule& s, const IntegratorConfig& cfg, const StateVector2d& initial);

/// Same, with an explicit step count.
Trajectory evolve_steps(const Schedule& s, Representation rep, std::int64_t steps,
                        int record_every, const StateVector2d& initial);

/// For each T_f: P2 of the NTO propagator on the schedule truncated to
/// [t0, T_f], starting from state 1. T_f == t0 gives exactly 0.
std::vector<std::pair<double, double>> evolve_nto_reference(const Schedule& s,
                                                            Representation rep,
                                                            std::span<const double> tf_grid);

enum class ConvergenceStatus {
    Clean,          ///< ratio is meaningful
    RoundingFloor,  ///< the finer difference is at rounding level
    Degenerate,     ///< both differences vanish (0/0)
};

const char* to_string(ConvergenceStatus status);

struct ConvergenceReport {
    double p2_dt = 0.0;
    double p2_half_dt = 0.0;
    double p2_quarter_dt = 0.0;
    /// (P2(dt) - P2(dt/2)) / (P2(dt/2) - P2(dt/4)); about 16 for RK4.
    /// NaN unless status is Clean.
    double ratio = 0.0;
    ConvergenceStatus status = ConvergenceStatus::Clean;
};

ConvergenceReport convergence_check(const Schedule& s, const IntegratorConfig& cfg,
                                    const StateVector2d& initial);

}  // namespace qkick

#endif  // QKICK_ODE_ENGINE_HPP
