#include "doctest.h"
#include "oracles.hpp"

#include "qkick/propagators.hpp"
#include "qkick/pulses.hpp"
#include "qkick/quadrature.hpp"

#include <numbers>

using namespace qkick;
using C = std::complex<double>;
constexpr double pi = std::numbers::pi;

TEST_CASE("value_at") {
    CHECK(value_at(GaussianPulse{std::sqrt(pi), 0.0, 1.0}, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    const RectangularPulse rect{2.0, 0.0, 4.0};
    CHECK(value_at(rect, 1.0) == 0.5);
    CHECK(value_at(rect, 5.0) == 0.0);
    CHECK(value_at(rect, 4.0) == 0.5);  // closed support
    CHECK_THROWS_AS(value_at(DeltaKick{0.7, 5.0}, 5.0), std::domain_error);
    CHECK_THROWS_WITH(value_at(DeltaKick{0.7, 5.0}, 1.0), "pointwise value undefined for delta kicks");
}

TEST_CASE("integrated_strength closed forms") {
    CHECK(integrated_strength(DeltaKick{0.7, 5.0}, 0.0, 10.0) == 0.7);
    CHECK(integrated_strength(DeltaKick{0.7, 5.0}, 5.0, 10.0) == 0.7);  // closed interval
    CHECK(integrated_strength(DeltaKick{0.7, 5.0}, 0.0, 4.9) == 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(integrated_strength(GaussianPulse{1.0, 0.0, 1.0}, -inf, inf) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(integrated_strength(GaussianPulse{1.0, 3.0, 0.5}, -inf, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(integrated_strength(RectangularPulse{2.0, 0.0, 4.0}, 0.0, 2.0) == 1.0);
    CHECK_THROWS_AS(integrated_strength(RectangularPulse{2.0, 0.0, 4.0}, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("property: quadrature of V matches the closed-form strength") {
    const std::vector<Pulse> pulses = {
        GaussianPulse{0.9, 10.0, 1.5}, GaussianPulse{-1.7, 4.0, 0.2}, RectangularPulse{1.1, 2.0, 3.0},
        GaussianPulse{std::sqrt(pi), 0.0, 1.0}};
    for (const auto& p : pulses) {
        const auto [lo, hi] = support(p);
        const double quad =
            adaptive_simpson([&](double t) { return value_at(p, t); }, lo, hi, {.abs_tol = 1e-12});
        CHECK(std::abs(quad - strength(p)) < 1e-10);
        CHECK(std::abs(integrated_strength(p, lo, hi) - strength(p)) < 1e-10);
    }
}

TEST_CASE("schedule construction") {
    SUBCASE("sorted by anchor time, stable for ties") {
        const Schedule s(1.0,
                         {DeltaKick{0.1, 5.0}, GaussianPulse{0.2, 1.0, 0.1}, DeltaKick{0.3, 5.0},
                          RectangularPulse{0.4, 3.0, 1.0}},
                         0.0, 10.0);
        REQUIRE(s.pulses().size() == 4);
        CHECK(anchor_time(s.pulses()[0]) == 1.0);
        CHECK(anchor_time(s.pulses()[1]) == 3.0);
        CHECK(strength(s.pulses()[2]) == 0.1);
        CHECK(strength(s.pulses()[3]) == 0.3);
        CHECK(s.warnings().empty());
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(Schedule(1.0, {}, 1.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(Schedule(1.0, {GaussianPulse{1.0, 0.0, 0.0}}, 0.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(Schedule(1.0, {RectangularPulse{1.0, 0.0, -1.0}}, 0.0, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(Schedule(1.0, {DeltaKick{1.0, 0.5, PauliAxis::Z}}, 0.0, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(Schedule(std::nan(""), {}, 0.0, 1.0), std::invalid_argument);
    }
    SUBCASE("support outside the window is flagged, not fatal") {
        const Schedule s(1.0, {GaussianPulse{1.0, 1.0, 1.0}}, 0.0, 20.0);
        CHECK(s.warnings().size() == 1);
    }
}

TEST_CASE("schrodinger_hamiltonian") {
    const Matrix2d h0 = schrodinger_hamiltonian(Schedule(2.0, {}, 0.0, 1.0), 0.3);
    Matrix2d expected = Matrix2d::Zero();
    expected(0, 0) = -1.0;
    expected(1, 1) = 1.0;
    CHECK(max_abs_diff(h0, expected) == 0.0);

    const Schedule rect(0.0, {RectangularPulse{1.0, 0.0, 1.0}}, 0.0, 2.0);
    CHECK(max_abs_diff(schrodinger_hamiltonian(rect, 0.5), pauli(PauliAxis::X)) == 0.0);

    const double alpha = 0.8, tau = 0.5;
    const Schedule g(2.0, {GaussianPulse{alpha, 3.0, tau}}, 0.0, 6.0);
    const Matrix2d want = -pauli(PauliAxis::Z) + pauli(PauliAxis::X) * (alpha / (std::sqrt(pi) * tau));
    CHECK(max_abs_diff(schrodinger_hamiltonian(g, 3.0), want) < 1e-15);
    CHECK(is_hermitian(schrodinger_hamiltonian(g, 2.7), 0.0));

    CHECK_THROWS_AS(schrodinger_hamiltonian(Schedule(1.0, {DeltaKick{1.0, 0.5}}, 0.0, 1.0), 0.2),
                    std::domain_error);
}

TEST_CASE("interaction_potential") {
    const GaussianPulse gx{0.8, 3.0, 0.7, PauliAxis::X};
    const GaussianPulse gy{0.8, 3.0, 0.7, PauliAxis::Y};

    SUBCASE("coincides with the Schrodinger coupling when dE = 0") {
        const Schedule s(0.0, {gx}, 0.0, 6.0);
        for (double t : {2.0, 3.0, 3.4})
            CHECK(max_abs_diff(interaction_potential(s, t), pauli(PauliAxis::X) * value_at(gx, t)) == 0.0);
    }
    SUBCASE("matches explicit conjugation exp(iH0 t) sigma exp(-iH0 t)") {
        for (const double de : {0.4, 1.0, 2.5}) {
            for (const auto& pulse : {gx, gy}) {
                const Schedule s(de, {pulse}, 0.0, 6.0);
                for (double t : {0.5, 2.9, pi / de, 4.4}) {
                    const Matrix2d r = oracle::rotate_frame(de, t);
                    const Matrix2d want = r * pauli(pulse.axis) * r.adjoint() * value_at(pulse, t);
                    CHECK(max_abs_diff(interaction_potential(s, t), want) < 1e-13);
                }
            }
        }
    }
    SUBCASE("dE t = pi flips sigma_x") {
        const double de = 1.3;
        const Schedule s(de, {gx}, 0.0, 6.0);
        const double t = pi / de;
        CHECK(max_abs_diff(interaction_potential(s, t), -pauli(PauliAxis::X) * value_at(gx, t)) < 1e-15);
    }
    SUBCASE("property: Hermitian, traceless, eigenvalues +-|V(t)|") {
        const Schedule s(1.7, {gx}, 0.0, 6.0);
        for (double t = 0.0; t <= 6.0; t += 0.25) {
            const Matrix2d v = interaction_potential(s, t);
            CHECK(is_hermitian(v, 1e-15));
            CHECK(std::abs(v.trace()) < 1e-15);
            CHECK(std::abs(v(0, 1)) == doctest::Approx(std::abs(value_at(gx, t))).epsilon(1e-14));
            const double det = std::abs(v.determinant());
            CHECK(std::sqrt(det) == doctest::Approx(std::abs(value_at(gx, t))).epsilon(1e-12));
        }
    }
}

TEST_CASE("time_average") {
    SUBCASE("zero pulses") {
        const Schedule s(1.0, {}, 0.0, 5.0);
        CHECK(time_average(s, Representation::Interaction).isZero(0.0));
        CHECK(time_average(s, Representation::Schrodinger).isZero(0.0));
    }
    SUBCASE("single kick exponentiates to the closed-form kick") {
        const double de = 1.1, alpha = 0.65, tk = 2.2, T = 5.0;
        const Schedule s(de, {DeltaKick{alpha, tk}}, 0.0, T);
        const Matrix2d avg = time_average(s, Representation::Interaction);
        CHECK(max_abs_diff(avg, rotated_pauli(PauliAxis::X, de, tk) * (alpha / T)) < 1e-15);
        CHECK(max_abs_diff(exp_minus_i_generator(Matrix2d(avg * T)), single_kick(de, {alpha, tk, PauliAxis::X})) <
              1e-14);
    }
    SUBCASE("opposite pair: generator size 2 alpha |sin(dE t_minus / 2)| in the sigma plane") {
        const double de = 0.9, alpha = 0.4, t1 = 1.0, t2 = 3.5, T = 6.0;
        const Schedule s(de, {DeltaKick{alpha, t1}, DeltaKick{-alpha, t2}}, 0.0, T);
        const Matrix2d avg = time_average(s, Representation::Interaction);
        const UnitVector3d c = pauli_coefficients(avg);
        CHECK(c.norm() ==
              doctest::Approx(2.0 * alpha / T * std::abs(std::sin(0.5 * de * (t2 - t1)))).epsilon(1e-14));
        CHECK(c.z() == 0.0);
        CHECK(max_abs_diff(exp_minus_i_generator(Matrix2d(avg * T)), nto_opposite_pair(de, alpha, t1, t2)) <
              1e-14);
    }
    SUBCASE("kick on the window boundary counts") {
        const Schedule s(1.0, {DeltaKick{0.5, 0.0}, DeltaKick{0.25, 4.0}}, 0.0, 4.0);
        const Matrix2d avg = time_average(s, Representation::Schrodinger);
        CHECK(avg(0, 1).real() == doctest::Approx(0.75 / 4.0));
    }
    SUBCASE("property: Hermitian in both pictures, pictures agree at dE = 0") {
        for (const double de : {0.0, 0.3, 2.0}) {
            const Schedule s(de,
                             {GaussianPulse{0.7, 3.0, 0.4}, RectangularPulse{-0.3, 4.0, 1.5, PauliAxis::Y}},
                             0.0, 8.0);
            const Matrix2d ai = time_average(s, Representation::Interaction);
            const Matrix2d as = time_average(s, Representation::Schrodinger);
            CHECK(is_hermitian(ai, 1e-12));
            CHECK(is_hermitian(as, 1e-12));
            if (de == 0.0)
                CHECK(max_abs_diff(ai, as) < 1e-12);
        }
    }
    SUBCASE("Gaussian, interaction picture: quadrature against a dense trapezoid oracle") {
        const double de = 0.8;
        const GaussianPulse g{1.2, 5.0, 0.6};
        const Schedule s(de, {g}, 0.0, 10.0);
        Matrix2d trap = Matrix2d::Zero();
        const int n = 200000;
        const double h = 10.0 / n;
        for (int i = 0; i <= n; ++i) {
            const double t = h * i;
            const double w = (i == 0 || i == n) ? 0.5 : 1.0;
            trap += rotated_pauli(PauliAxis::X, de, t) * (w * h * value_at(g, t));
        }
        CHECK(max_abs_diff(Matrix2d(time_average(s, Representation::Interaction) * 10.0), trap) < 1e-9);
    }
}
