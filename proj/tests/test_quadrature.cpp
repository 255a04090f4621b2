// test_quadrature.cpp — panel integration, breakpoint lattices, and the
// principal-value evaluation.
#include <doctest.h>

#include <cmath>

#include "oqs/chain_params.hpp"
#include "oqs/quadrature.hpp"

using namespace oqs;

TEST_CASE("panel nodes integrate high-degree polynomials exactly") {
    const PanelNodes nodes = panel_nodes({-1.0, 1.0});
    REQUIRE(nodes.x.size() == 10);
    // ten-point Gauss-Legendre is exact through degree 19
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.x.size(); ++i)
        sum += nodes.w[i] * std::pow(nodes.x[i], 18);
    CHECK(sum == doctest::Approx(2.0 / 19.0).epsilon(1e-14));
    double odd = 0.0;
    for (std::size_t i = 0; i < nodes.x.size(); ++i)
        odd += nodes.w[i] * std::pow(nodes.x[i], 19);
    CHECK(std::abs(odd) < 1e-15);
}

TEST_CASE("adaptive integration reaches tight tolerances") {
    const QuadratureSpec quad;
    const double third =
        integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0, quad);
    CHECK(third == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    const double zero = integrate_adaptive(
        [](double x) { return std::sin(x); }, 0.0, 2.0 * M_PI, quad);
    CHECK(std::abs(zero) < 1e-13);
    // cumulative spectral weight against the closed form
    const double wc = 3.0;
    const double u = 40.0;
    const double full = integrate_adaptive(
        [wc](double w) { return spectral_density(w, wc); }, 0.0, u * wc, quad);
    const double closed = wc * wc * (1.0 - std::exp(-u) * (1.0 + u));
    CHECK(full == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("adaptive integration reports exhausted budgets") {
    QuadratureSpec quad;
    quad.max_panels = 64;
    CHECK_THROWS_AS(
        (void)integrate_adaptive([](double x) { return std::sin(1e4 * x); },
                                 0.0, 1.0, quad),
        std::runtime_error);
}

TEST_CASE("oscillatory breakpoints cover the window and the sinc lattice") {
    const ChainParams p;
    const NormalModes nm = normal_modes(p);
    const QuadratureSpec quad;
    const double dt = 2.0;
    const std::vector<double> pts =
        oscillatory_breakpoints(nm, p.omega_c, dt, quad);
    REQUIRE(pts.size() >= 3);
    CHECK(pts.front() == doctest::Approx(-p.omega_c).epsilon(1e-15));
    CHECK(pts.back() == doctest::Approx(p.omega_c).epsilon(1e-15));
    bool has_zero = false;
    for (double x : pts)
        if (std::abs(x) < 1e-13) has_zero = true;
    CHECK(has_zero);
    // panel width never exceeds the half-oscillation scale pi / dt
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i] > pts[i - 1]);
        CHECK(pts[i] - pts[i - 1] <= M_PI / dt + 1e-12);
    }
    // every mode energy sits on the lattice
    for (double e : nm.epsilon) {
        bool found = false;
        for (double x : pts)
            if (std::abs(x - e) < 1e-12) found = true;
        CHECK(found);
    }
}

TEST_CASE("breakpoint budget throws with the required panel count") {
    const ChainParams p;
    const NormalModes nm = normal_modes(p);
    QuadratureSpec quad;
    quad.max_panels = 64;
    CHECK_THROWS_AS(
        (void)oscillatory_breakpoints(nm, p.omega_c, 1e4, quad),
        std::runtime_error);
}

TEST_CASE("principal value against frozen references") {
    const ChainParams p;
    const QuadratureSpec quad;
    // independent adaptive-quadrature references for the pole integral
    CHECK(lamb_shift_pv(1.0, p, quad) ==
          doctest::Approx(-3.1132779460324764).epsilon(5e-12));
    CHECK(lamb_shift_pv(-0.5, p, quad) ==
          doctest::Approx(-2.188100959714336).epsilon(5e-12));
    const double eps_ref[3] = {0.5757359312880714, 1.0, 1.4242640687119286};
    const double s_ref[3] = {-3.414363567320624, -3.1132779460324764,
                             -2.672307880452182};
    for (int i = 0; i < 3; ++i)
        CHECK(lamb_shift_pv(eps_ref[i], p, quad) ==
              doctest::Approx(s_ref[i]).epsilon(5e-12));
}

TEST_CASE("quadrature settings validation") {
    QuadratureSpec quad;
    CHECK_NOTHROW(quad.validate());
    quad.rel_tol = 0.0;
    CHECK_THROWS_AS(quad.validate(), std::invalid_argument);
    quad = QuadratureSpec{};
    quad.max_panels = 8;
    CHECK_THROWS_AS(quad.validate(), std::invalid_argument);
}
