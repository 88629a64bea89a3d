#include "qkick/diagnostics.hpp"

#include "qkick/ode_engine.hpp"
#include "qkick/propagators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace qkick {

namespace {

void require_epsilon(double epsilon) {
    if (!std::isfinite(epsilon) || std::abs(epsilon) > 1.0)
        throw std::invalid_argument("epsilon is a sine and must lie in [-1, 1]");
}

/// Runs body(i) for i in [0, n). Each index writes its own slot, so the
/// output is identical for any worker count. The first exception wins.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, const Body& body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                    }
                }
            });
    }
    if (error)
        std::rethrow_exception(error);
}

const StateVector2d kGround{1.0, 0.0};

Schedule gaussian_schedule(double delta_e, double alpha, double t_k, double tau, double t0,
                           double tf) {
    return Schedule(delta_e, {GaussianPulse{alpha, t_k, tau, PauliAxis::X}}, t0, tf);
}

double p2_of(const Matrix2d& u) { return std::norm(u(1, 0)); }

}  // namespace

double p2_ordered(double epsilon, double phi) {
    require_epsilon(epsilon);
    const double a = epsilon * std::sin(phi);
    return a * a;
}

double p2_nto(double epsilon, double phi) {
    require_epsilon(epsilon);
    const double s = std::sin(epsilon * phi);
    return s * s;
}

std::vector<SurfacePoint> ordering_difference_surface(std::span<const double> eps_grid,
                                                      std::span<const double> phi_grid,
                                                      ParallelOptions par) {
    for (const double e : eps_grid)
        require_epsilon(e);
    std::vector<SurfacePoint> out(eps_grid.size() * phi_grid.size());
    parallel_for(eps_grid.size(), par.workers, [&](std::size_t i) {
        for (std::size_t j = 0; j < phi_grid.size(); ++j) {
            const double e = eps_grid[i];
            const double f = phi_grid[j];
            const double ordered = p2_ordered(e, f);
            const double unordered = p2_nto(e, f);
            out[i * phi_grid.size() + j] = {e, f, ordered, unordered, ordered - unordered};
        }
    });
    return out;
}

std::vector<double> stepped_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(hi - lo))
        throw std::invalid_argument("stepped_grid: needs step > 0 and finite max >= min");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step * (1.0 + 1e-12)));
    const bool lands_on_hi = n > 0 && std::abs(lo + step * static_cast<double>(n) - hi) <= 1e-9 * step;
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        g[i] = lands_on_hi ? lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n)
                           : lo + step * static_cast<double>(i);
    return g;
}

std::vector<double> default_epsilon_grid() { return stepped_grid(0.0, 1.0, 0.02); }

// 0.05 does not divide 2 pi; the grid stops at the last step inside.
std::vector<double> default_phi_grid() { return stepped_grid(0.0, 2.0 * std::numbers::pi, 0.05); }

const char* to_string(MapRegime r) {
    switch (r) {
        case MapRegime::Perturbative: return "perturbative";
        case MapRegime::KickedPerturbative: return "kicked-perturbative";
        case MapRegime::KickedAdiabatic: return "kicked-adiabatic";
        case MapRegime::Adiabatic: return "adiabatic";
        case MapRegime::Intermediate: return "intermediate";
    }
    return "?";
}

MapRegime classify_regime(double half_split_phase, double strength_phase) {
    if (!(half_split_phase >= 0.0) || !(strength_phase >= 0.0))
        throw std::invalid_argument("classify_regime: phases must be non-negative");
    const bool split_small = half_split_phase < kSmallPhase;
    const bool split_large = half_split_phase > kLargePhase;
    const bool strength_small = strength_phase < kSmallPhase;
    const bool strength_large = strength_phase > kLargePhase;
    if (split_small && strength_small)
        return MapRegime::KickedPerturbative;
    if (split_small && strength_large)
        return MapRegime::KickedAdiabatic;
    if (split_large && strength_large)
        return MapRegime::Adiabatic;
    if (split_large && strength_small)
        return MapRegime::Perturbative;
    return MapRegime::Intermediate;
}

std::vector<KickLimitRow> kick_limit_scan(double delta_e, double alpha, double t_k,
                                          std::span<const double> taus, ScanWindow window,
                                          ParallelOptions par) {
    if (taus.empty())
        return {};
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (!(taus[i] > 0.0))
            throw std::invalid_argument("kick_limit_scan: widths must be positive");
        if (i > 0 && !(taus[i] < taus[i - 1]))
            throw std::invalid_argument("kick_limit_scan: widths must be strictly descending");
    }
    const double tf = window.tf.value_or(t_k + kGaussianSupportWidths * taus.front());

    std::vector<KickLimitRow> rows(taus.size());
    parallel_for(taus.size(), par.workers, [&](std::size_t i) {
        const Schedule s = gaussian_schedule(delta_e, alpha, t_k, taus[i], window.t0, tf);
        const Trajectory traj =
            evolve(s, default_config(s, Representation::Interaction), kGround);
        rows[i] = {taus[i], probabilities(traj.final_state()).p2,
                   p2_of(nto_propagator(s, Representation::Interaction)),
                   p2_of(nto_propagator(s, Representation::Schrodinger))};
    });
    return rows;
}

std::vector<ObservationRow> observation_time_scan(double delta_e, double alpha, double t_k,
                                                  double tau, std::span<const double> tf_grid,
                                                  double t0, ParallelOptions par) {
    for (std::size_t i = 0; i < tf_grid.size(); ++i) {
        if (!(tf_grid[i] > t_k))
            throw std::invalid_argument("observation_time_scan: T_f must exceed t_k");
        if (i > 0 && !(tf_grid[i] > tf_grid[i - 1]))
            throw std::invalid_argument("observation_time_scan: T_f grid must be ascending");
    }
    std::vector<ObservationRow> rows(tf_grid.size());
    parallel_for(tf_grid.size(), par.workers, [&](std::size_t i) {
        const Schedule s = gaussian_schedule(delta_e, alpha, t_k, tau, t0, tf_grid[i]);
        const Trajectory traj =
            evolve(s, default_config(s, Representation::Interaction), kGround);
        rows[i] = {tf_grid[i], probabilities(traj.final_state()).p2,
                   p2_of(nto_propagator(s, Representation::Schrodinger)),
                   p2_of(nto_propagator(s, Representation::Interaction))};
    });
    return rows;
}

}  // namespace qkick
