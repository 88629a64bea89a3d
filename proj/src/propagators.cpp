#include "qkick/propagators.hpp"

#include <cmath>
#include <stdexcept>

namespace qkick {

namespace {

using C = std::complex<double>;

void require_transverse(PauliAxis axis) {
    if (axis == PauliAxis::Z)
        throw std::invalid_argument("kick axis must be X or Y");
}

}  // namespace

Matrix2d single_kick(double delta_e, const KickSpec& k) {
    require_transverse(k.axis);
    return Matrix2d::Identity() * C(std::cos(k.alpha)) +
           rotated_pauli(k.axis, delta_e, k.t_k) * C(0.0, -std::sin(k.alpha));
}

Matrix2d kick_sequence(double delta_e, std::span<const KickSpec> kicks) {
    for (std::size_t i = 1; i < kicks.size(); ++i)
        if (kicks[i].t_k < kicks[i - 1].t_k)
            throw std::invalid_argument("kick_sequence: kicks must be sorted by time");

    Matrix2d u = Matrix2d::Identity();
    std::size_t i = 0;
    while (i < kicks.size()) {
        std::size_t j = i + 1;
        while (j < kicks.size() && kicks[j].t_k == kicks[i].t_k)
            ++j;
        if (j == i + 1) {
            u = compose(single_kick(delta_e, kicks[i]), u);
        } else {
            Matrix2d generator = Matrix2d::Zero();
            for (std::size_t m = i; m < j; ++m) {
                require_transverse(kicks[m].axis);
                generator += rotated_pauli(kicks[m].axis, delta_e, kicks[m].t_k) * kicks[m].alpha;
            }
            u = compose(exp_minus_i_generator(generator), u);
        }
        i = j;
    }
    return u;
}

Matrix2d opposite_kick_pair_closed_form(double delta_e, double alpha, double t_minus,
                                        double t_plus) {
    const double half = 0.5 * delta_e * t_minus;
    const double c2a = std::cos(2.0 * alpha);
    const double off = std::sin(2.0 * alpha) * std::sin(half);
    const C centre_phase = std::polar(1.0, 0.5 * delta_e * t_plus);
    Matrix2d u;
    u(0, 0) = std::polar(1.0, -half) * C(std::cos(half), c2a * std::sin(half));
    u(0, 1) = std::conj(centre_phase) * off;
    u(1, 0) = -centre_phase * off;
    u(1, 1) = std::polar(1.0, half) * C(std::cos(half), -c2a * std::sin(half));
    return u;
}

Matrix2d opposite_kick_pair(double delta_e, double alpha, double t1, double t2) {
    if (t2 < t1)
        throw std::invalid_argument("opposite_kick_pair: requires t2 >= t1");
    return opposite_kick_pair_closed_form(delta_e, alpha, t2 - t1, t1 + t2);
}

Matrix2d nto_propagator(const Schedule& s, Representation rep) {
    Matrix2d generator = integrated_coupling(s, rep, s.t0(), s.tf());
    if (rep == Representation::Schrodinger)
        generator += free_hamiltonian(s.delta_e()) * s.duration();
    return exp_minus_i_generator(generator);
}

Matrix2d nto_opposite_pair(double delta_e, double alpha, double t1, double t2,
                           double off_diagonal_phase) {
    if (t2 < t1)
        throw std::invalid_argument("nto_opposite_pair: requires t2 >= t1");
    const double x = 2.0 * alpha * std::sin(0.5 * delta_e * (t2 - t1));
    const C phase = std::polar(1.0, off_diagonal_phase);
    Matrix2d u;
    u(0, 0) = std::cos(x);
    u(0, 1) = std::conj(phase) * std::sin(x);
    u(1, 0) = -phase * std::sin(x);
    u(1, 1) = std::cos(x);
    return u;
}

Matrix2d nto_opposite_pair(double delta_e, double alpha, double t1, double t2) {
    return nto_opposite_pair(delta_e, alpha, t1, t2, 0.5 * delta_e * (t1 + t2));
}

Matrix2d change_representation(const Matrix2d& u, double delta_e, double t, double t0,
                               Representation to) {
    if (to == Representation::Schrodinger)
        return free_propagator(delta_e, t) * u * free_propagator(delta_e, -t0);
    return free_propagator(delta_e, -t) * u * free_propagator(delta_e, t0);
}

}  // namespace qkick
