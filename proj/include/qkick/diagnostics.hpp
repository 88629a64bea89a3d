// diagnostics.hpp
//
// Observable-level studies: the ordered-vs-unordered transfer surface for
// a +/- kick pair, the qubit-map regimes, and Gaussian-pulse scans in the
// pulse width and in the observation time.

#ifndef QKICK_DIAGNOSTICS_HPP
#define QKICK_DIAGNOSTICS_HPP

#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace qkick {

/// P2 with time ordering for the +/- kick pair: (epsilon sin phi)^2, where
/// epsilon = sin(dE t_minus / 2) and phi = 2 alpha. |epsilon| > 1 throws.
double p2_ordered(double epsilon, double phi);

/// P2 without time ordering: sin^2(epsilon phi).
double p2_nto(double epsilon, double phi);

struct SurfacePoint {
    double epsilon;
    double phi;
    double p2_ordered;
    double p2_nto;
    double difference;  ///< p2_ordered - p2_nto
};

/// Worker count for grid evaluations; results never depend on it.
struct ParallelOptions {
    unsigned workers = 1;
};

/// Cartesian product, row-major with epsilon outer and phi inner.
std::vector<SurfacePoint> ordering_difference_surface(std::span<const double> eps_grid,
                                                      std::span<const double> phi_grid,
                                                      ParallelOptions par = {});

/// lo, lo + step, ... up to hi. When hi is a whole number of steps away
/// it is hit exactly. Throws std::invalid_argument for step <= 0 or hi < lo.
std::vector<double> stepped_grid(double lo, double hi, double step);

/// epsilon in [0, 1] step 0.02 and phi in [0, 2 pi] step 0.05.
std::vector<double> default_epsilon_grid();
std::vector<double> default_phi_grid();

enum class MapRegime { Perturbative, KickedPerturbative, KickedAdiabatic, Adiabatic, Intermediate };

const char* to_string(MapRegime r);

/// Phases below 0.2 * 2 pi count as small and above 5 * 2 pi as large.
inline constexpr double kSmallPhase = 0.2 * 2.0 * std::numbers::pi;
inline constexpr double kLargePhase = 5.0 * 2.0 * std::numbers::pi;

/// Regime of the qubit map at (dE tau / 2, integral of V). Negative input throws.
MapRegime classify_regime(double half_split_phase, double strength_phase);

struct KickLimitRow {
    double tau;
    double p2_rk4_ordered;
    double p2_nto_interaction;
    double p2_nto_schrodinger;
};

/// Integration window shared by all rows of a scan.
struct ScanWindow {
    double t0 = 0.0;
    /// Defaults to t_k + 6 * max(tau).
    std::optional<double> tf;
};

/// Gaussian sigma_x pulse of strength alpha centered at t_k, one row per
/// width. taus must be positive and strictly descending.
std::vector<KickLimitRow> kick_limit_scan(double delta_e, double alpha, double t_k,
                                          std::span<const double> taus, ScanWindow window = {},
                                          ParallelOptions par = {});

struct ObservationRow {
    double tf;
    double p2_ordered;
    double p2_nto_schrodinger;
    double p2_nto_interaction;
};

/// One row per observation time T_f (ascending, all > t_k, window [t0, T_f]).
std::vector<ObservationRow> observation_time_scan(double delta_e, double alpha, double t_k,
                                                  double tau, std::span<const double> tf_grid,
                                                  double t0 = 0.0, ParallelOptions par = {});

}  // namespace qkick

#endif  // QKICK_DIAGNOSTICS_HPP
