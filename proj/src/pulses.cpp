#include "qkick/pulses.hpp"

#include "qkick/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qkick {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_all(std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

const char* to_string(Representation rep) {
    return rep == Representation::Schrodinger ? "schrodinger" : "interaction";
}

void validate(const Pulse& p) {
    if (axis_of(p) == PauliAxis::Z)
        throw std::invalid_argument("pulse coupling must be along sigma_x or sigma_y");
    std::visit(overloaded{
                   [](const DeltaKick& k) {
                       if (!finite_all({k.alpha, k.t_k}))
                           throw std::invalid_argument("kick: non-finite field");
                   },
                   [](const GaussianPulse& g) {
                       if (!finite_all({g.alpha, g.t_k, g.tau}))
                           throw std::invalid_argument("gaussian: non-finite field");
                       if (!(g.tau > 0.0))
                           throw std::invalid_argument("gaussian: tau must be positive");
                   },
                   [](const RectangularPulse& r) {
                       if (!finite_all({r.alpha, r.t_start, r.tau}))
                           throw std::invalid_argument("rectangular: non-finite field");
                       if (!(r.tau > 0.0))
                           throw std::invalid_argument("rectangular: tau must be positive");
                   },
               },
               p);
}

bool is_kick(const Pulse& p) { return std::holds_alternative<DeltaKick>(p); }

double strength(const Pulse& p) {
    return std::visit([](const auto& q) { return q.alpha; }, p);
}

PauliAxis axis_of(const Pulse& p) {
    return std::visit([](const auto& q) { return q.axis; }, p);
}

double anchor_time(const Pulse& p) {
    return std::visit(overloaded{
                          [](const DeltaKick& k) { return k.t_k; },
                          [](const GaussianPulse& g) { return g.t_k; },
                          [](const RectangularPulse& r) { return r.t_start; },
                      },
                      p);
}

std::pair<double, double> support(const Pulse& p) {
    return std::visit(overloaded{
                          [](const DeltaKick& k) { return std::pair{k.t_k, k.t_k}; },
                          [](const GaussianPulse& g) {
                              const double half = kGaussianSupportWidths * g.tau;
                              return std::pair{g.t_k - half, g.t_k + half};
                          },
                          [](const RectangularPulse& r) {
                              return std::pair{r.t_start, r.t_start + r.tau};
                          },
                      },
                      p);
}

double value_at(const Pulse& p, double t) {
    return std::visit(overloaded{
                          [](const DeltaKick&) -> double {
                              throw std::domain_error(
                                  "pointwise value undefined for delta kicks");
                          },
                          [t](const GaussianPulse& g) {
                              const double x = (t - g.t_k) / g.tau;
                              return g.alpha / (std::sqrt(std::numbers::pi) * g.tau) *
                                     std::exp(-x * x);
                          },
                          [t](const RectangularPulse& r) {
                              return (t >= r.t_start && t <= r.t_start + r.tau) ? r.alpha / r.tau
                                                                                : 0.0;
                          },
                      },
                      p);
}

double integrated_strength(const Pulse& p, double t0, double t) {
    if (t < t0)
        throw std::invalid_argument("integrated_strength: t < t0");
    return std::visit(overloaded{
                          [&](const DeltaKick& k) {
                              return (k.t_k >= t0 && k.t_k <= t) ? k.alpha : 0.0;
                          },
                          [&](const GaussianPulse& g) {
                              return 0.5 * g.alpha *
                                     (std::erf((t - g.t_k) / g.tau) -
                                      std::erf((t0 - g.t_k) / g.tau));
                          },
                          [&](const RectangularPulse& r) {
                              const double lo = std::max(t0, r.t_start);
                              const double hi = std::min(t, r.t_start + r.tau);
                              return hi > lo ? r.alpha * (hi - lo) / r.tau : 0.0;
                          },
                      },
                      p);
}

Schedule::Schedule(double delta_e, std::vector<Pulse> pulses, double t0, double tf)
    : delta_e_(delta_e), pulses_(std::move(pulses)), t0_(t0), tf_(tf) {
    if (!finite_all({delta_e, t0, tf}))
        throw std::invalid_argument("schedule: non-finite delta_e or window");
    if (!(tf > t0))
        throw std::invalid_argument("schedule: tf must exceed t0");
    for (const auto& p : pulses_)
        validate(p);
    std::stable_sort(pulses_.begin(), pulses_.end(), [](const Pulse& a, const Pulse& b) {
        return anchor_time(a) < anchor_time(b);
    });
    for (std::size_t i = 0; i < pulses_.size(); ++i) {
        const auto [lo, hi] = support(pulses_[i]);
        if (lo < t0_ || hi > tf_) {
            std::ostringstream os;
            os << "pulse " << i << " support [" << lo << ", " << hi
               << "] extends outside the window [" << t0_ << ", " << tf_ << "]";
            warnings_.push_back(os.str());
        }
    }
}

bool Schedule::has_kicks() const {
    return std::any_of(pulses_.begin(), pulses_.end(), [](const Pulse& p) { return is_kick(p); });
}

bool Schedule::has_smooth_pulses() const {
    return std::any_of(pulses_.begin(), pulses_.end(),
                       [](const Pulse& p) { return !is_kick(p); });
}

Schedule Schedule::with_window(double t0, double tf) const {
    return Schedule(delta_e_, pulses_, t0, tf);
}

Matrix2d rotated_pauli(PauliAxis axis, double delta_e, double t) {
    Matrix2d m = pauli(axis);
    const std::complex<double> phase = std::polar(1.0, delta_e * t);
    m(0, 1) *= std::conj(phase);
    m(1, 0) *= phase;
    return m;
}

Matrix2d free_propagator(double delta_e, double t) {
    Matrix2d m = Matrix2d::Zero();
    m(0, 0) = std::polar(1.0, 0.5 * delta_e * t);
    m(1, 1) = std::polar(1.0, -0.5 * delta_e * t);
    return m;
}

Matrix2d free_hamiltonian(double delta_e) {
    return pauli(PauliAxis::Z) * std::complex<double>(-0.5 * delta_e);
}

namespace {

void require_no_kicks(const Schedule& s) {
    if (s.has_kicks())
        throw std::domain_error("pointwise value undefined for delta kicks");
}

}  // namespace

Matrix2d coupling(const Schedule& s, Representation rep, double t) {
    require_no_kicks(s);
    Matrix2d v = Matrix2d::Zero();
    for (const auto& p : s.pulses()) {
        const double amp = value_at(p, t);
        if (amp == 0.0)
            continue;
        const Matrix2d sigma = rep == Representation::Interaction
                                   ? rotated_pauli(axis_of(p), s.delta_e(), t)
                                   : pauli(axis_of(p));
        v += sigma * amp;
    }
    return v;
}

Matrix2d schrodinger_hamiltonian(const Schedule& s, double t) {
    return free_hamiltonian(s.delta_e()) + coupling(s, Representation::Schrodinger, t);
}

Matrix2d interaction_potential(const Schedule& s, double t) {
    return coupling(s, Representation::Interaction, t);
}

std::vector<std::pair<double, double>> smooth_support_segments(const Schedule& s, double a,
                                                               double b) {
    std::vector<std::pair<double, double>> raw;
    for (const auto& p : s.pulses()) {
        if (is_kick(p))
            continue;
        auto [lo, hi] = support(p);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
        if (hi > lo)
            raw.emplace_back(lo, hi);
    }
    std::sort(raw.begin(), raw.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& seg : raw) {
        if (!merged.empty() && seg.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, seg.second);
        else
            merged.push_back(seg);
    }
    return merged;
}

Matrix2d integrated_coupling(const Schedule& s, Representation rep, double a, double b,
                             double abs_tol) {
    if (b < a)
        throw std::invalid_argument("integrated_coupling: b < a");
    Matrix2d total = Matrix2d::Zero();
    // Pulses are either kicks or smooth; each kind is handled in closed form
    // except the rotated smooth coupling, which needs quadrature.
    std::vector<Pulse> smooth;
    for (const auto& p : s.pulses()) {
        if (is_kick(p)) {
            const auto& k = std::get<DeltaKick>(p);
            if (k.t_k < a || k.t_k > b)
                continue;
            const Matrix2d sigma = rep == Representation::Interaction
                                       ? rotated_pauli(k.axis, s.delta_e(), k.t_k)
                                       : pauli(k.axis);
            total += sigma * k.alpha;
        } else if (rep == Representation::Schrodinger) {
            total += pauli(axis_of(p)) * integrated_strength(p, a, b);
        } else {
            smooth.push_back(p);
        }
    }
    if (smooth.empty())
        return total;

    const Schedule smooth_only(s.delta_e(), smooth, s.t0(), s.tf());
    const auto integrand = [&](double t) -> Matrix2d {
        return coupling(smooth_only, Representation::Interaction, t);
    };
    const auto segments = smooth_support_segments(smooth_only, a, b);
    const double per_segment = abs_tol / static_cast<double>(std::max<std::size_t>(1, segments.size()));
    for (const auto& [lo, hi] : segments)
        total += adaptive_simpson(integrand, lo, hi, {.abs_tol = per_segment});
    return total;
}

Matrix2d time_average(const Schedule& s, Representation rep) {
    return integrated_coupling(s, rep, s.t0(), s.tf(), kTolQuad * s.duration()) /
           std::complex<double>(s.duration());
}

}  // namespace qkick
