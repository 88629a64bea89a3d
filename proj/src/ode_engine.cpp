#include "qkick/ode_engine.hpp"

#include "qkick/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qkick {

namespace {

using Block = Eigen::Matrix<std::complex<double>, 2, 3>;

double min_width(const Schedule& s) {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& p : s.pulses()) {
        if (const auto* g = std::get_if<GaussianPulse>(&p))
            w = std::min(w, g->tau);
        else if (const auto* r = std::get_if<RectangularPulse>(&p))
            w = std::min(w, r->tau);
    }
    return w;
}

double rabi_period(const Schedule& s) {
    return s.delta_e() == 0.0 ? std::numeric_limits<double>::infinity()
                              : 2.0 * std::numbers::pi / std::abs(s.delta_e());
}

Matrix2d generator_at(const Schedule& s, Representation rep, double t) {
    return rep == Representation::Schrodinger ? schrodinger_hamiltonian(s, t)
                                              : interaction_potential(s, t);
}

}  // namespace

IntegratorConfig default_config(const Schedule& s, Representation rep) {
    double dt = std::min(min_width(s) / 40.0, rabi_period(s) / 400.0);
    if (!std::isfinite(dt))
        dt = s.duration() / 400.0;
    return {dt, rep, 1};
}

double step_warning_threshold(const Schedule& s) {
    return std::min(min_width(s) / 20.0, rabi_period(s) / 200.0);
}

double Trajectory::norm_drift() const {
    const auto p = probabilities(final_state());
    return std::abs(1.0 - (p.p1 + p.p2));
}

Trajectory evolve_steps(const Schedule& s, Representation rep, std::int64_t steps,
                        int record_every, const StateVector2d& initial) {
    if (s.has_kicks())
        throw std::domain_error("evolve: delta kicks are handled by the closed-form propagators");
    if (steps <= 0)
        throw std::invalid_argument("evolve: step count must be positive");
    if (steps > kMaxSteps)
        throw std::length_error("evolve: step count exceeds 1e9");
    if (record_every <= 0)
        throw std::invalid_argument("evolve: record_every must be positive");
    if (!initial.allFinite() || std::abs(initial.squaredNorm() - 1.0) > kTolNorm)
        throw std::invalid_argument("evolve: initial state must be normalized");

    const double h = s.duration() / static_cast<double>(steps);
    const std::complex<double> minus_i(0.0, -1.0);

    // Columns: the state itself and the two basis vectors (propagator).
    Block y;
    y.col(0) = initial;
    y.col(1) << 1.0, 0.0;
    y.col(2) << 0.0, 1.0;

    Trajectory traj;
    traj.steps = steps;
    const auto n_records = static_cast<std::size_t>(steps / record_every + 2);
    traj.times.reserve(n_records);
    traj.states.reserve(n_records);
    traj.times.push_back(s.t0());
    traj.states.push_back(y.col(0));

    Matrix2d h_prev = generator_at(s, rep, s.t0());
    for (std::int64_t n = 0; n < steps; ++n) {
        const double t = s.t0() + h * static_cast<double>(n);
        const double t_mid = t + 0.5 * h;
        const double t_next = (n + 1 == steps) ? s.tf() : s.t0() + h * static_cast<double>(n + 1);
        const Matrix2d h_mid = generator_at(s, rep, t_mid);
        const Matrix2d h_next = generator_at(s, rep, t_next);

        const Block k1 = minus_i * (h_prev * y);
        const Block k2 = minus_i * (h_mid * (y + (0.5 * h) * k1));
        const Block k3 = minus_i * (h_mid * (y + (0.5 * h) * k2));
        const Block k4 = minus_i * (h_next * (y + h * k3));
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        h_prev = h_next;

        if ((n + 1) % record_every == 0 || n + 1 == steps) {
            traj.times.push_back(t_next);
            traj.states.push_back(y.col(0));
        }
    }
    traj.final_propagator = y.rightCols<2>();
    return traj;
}

Trajectory evolve(const Schedule& s, const IntegratorConfig& cfg, const StateVector2d& initial) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
        throw std::invalid_argument("evolve: dt must be positive");
    const double n = std::ceil(s.duration() / cfg.dt * (1.0 - 1e-12));
    if (n > static_cast<double>(kMaxSteps))
        throw std::length_error("evolve: step count exceeds 1e9");
    return evolve_steps(s, cfg.representation, std::max<std::int64_t>(1, static_cast<std::int64_t>(n)),
                        cfg.record_every, initial);
}

std::vector<std::pair<double, double>> evolve_nto_reference(const Schedule& s,
                                                            Representation rep,
                                                            std::span<const double> tf_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(tf_grid.size());
    for (const double tf : tf_grid) {
        if (tf < s.t0())
            throw std::invalid_argument("evolve_nto_reference: T_f precedes t0");
        if (tf == s.t0()) {
            out.emplace_back(tf, 0.0);
            continue;
        }
        const Matrix2d u = nto_propagator(s.with_window(s.t0(), tf), rep);
        out.emplace_back(tf, std::norm(u(1, 0)));
    }
    return out;
}

const char* to_string(ConvergenceStatus status) {
    switch (status) {
        case ConvergenceStatus::Clean: return "clean";
        case ConvergenceStatus::RoundingFloor: return "rounding-floor";
        case ConvergenceStatus::Degenerate: return "degenerate";
    }
    return "?";
}

ConvergenceReport convergence_check(const Schedule& s, const IntegratorConfig& cfg,
                                    const StateVector2d& initial) {
    const Trajectory coarse = evolve(s, cfg, initial);
    const std::int64_t n = coarse.steps;
    const auto p2 = [](const Trajectory& t) { return probabilities(t.final_state()).p2; };
    if (4 * n > kMaxSteps)
        throw std::length_error("convergence_check: step count exceeds 1e9");

    ConvergenceReport r;
    r.p2_dt = p2(coarse);
    r.p2_half_dt = p2(evolve_steps(s, cfg.representation, 2 * n, cfg.record_every, initial));
    r.p2_quarter_dt = p2(evolve_steps(s, cfg.representation, 4 * n, cfg.record_every, initial));

    const double d1 = r.p2_dt - r.p2_half_dt;
    const double d2 = r.p2_half_dt - r.p2_quarter_dt;
    // Differences below a few ulps of an O(1) probability carry no order
    // information.
    constexpr double floor = 64.0 * std::numeric_limits<double>::epsilon();
    if (std::abs(d1) <= floor && std::abs(d2) <= floor) {
        r.status = ConvergenceStatus::Degenerate;
        r.ratio = std::numeric_limits<double>::quiet_NaN();
    } else if (std::abs(d2) <= floor) {
        r.status = ConvergenceStatus::RoundingFloor;
        r.ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
        r.ratio = d1 / d2;
    }
    return r;
}

}  // namespace qkick
