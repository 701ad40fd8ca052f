#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tricomi/numerics.hpp"
#include "tricomi/trace_system.hpp"

using namespace tricomi;

namespace {

// Reference values below were frozen from a 40-digit arbitrary-precision
// evaluation of the closed forms, with the Green identity additionally
// cross-checked against a high-order adaptive ODE integration.

ProblemSpec smooth_spec() {
    ProblemSpec spec;
    spec.alpha = 0.5;
    spec.gamma1 = 1.0;
    spec.gamma2 = 1.0;
    spec.phi1 = [](double y) { return 0.2 + y * y; };
    spec.phi2 = [](double y) { return 0.3 + 0.1 * y; };
    spec.psi = [](double x) { return 0.2 + x * x; };
    spec.big_q = [](double x, double t) {
        return std::exp(-x) * (1.0 + std::exp(-t));
    };
    return spec;
}

double g_half() { return std::tgamma(0.5); }

} // namespace

TEST_CASE("green function matches frozen closed-form values") {
    CHECK(green_g0(0.5, 0.25, 1.0) ==
          Catch::Approx(-0.13768751663174727211).margin(1e-15));
    CHECK(green_g0(0.5, 0.25, -1.0) ==
          Catch::Approx(-0.10723114577196185716).margin(1e-15));
    CHECK(green_g0(0.3, 0.7, 40.0) ==
          Catch::Approx(-2.8133447960871520302e-9).epsilon(1e-12));
    CHECK(green_g0(0.7, 0.3, 40.0) ==
          Catch::Approx(-0.024999692790326117332).margin(1e-14));
    CHECK(green_g0(0.3, 0.7, -40.0) ==
          Catch::Approx(-0.024999692790326117332).margin(1e-14));

    CHECK(green_g0(0.5, 0.25, 1.0, G0Variant::paper_literal) ==
          Catch::Approx(-0.10723114577196185716).margin(1e-15));
    CHECK(green_g0(0.5, 0.25, -1.0, G0Variant::paper_literal) ==
          Catch::Approx(-0.13768751663174727211).margin(1e-15));
    CHECK(green_g0(0.3, 0.7, 40.0, G0Variant::paper_literal) ==
          Catch::Approx(-0.024999692790326117332).margin(1e-14));
}

TEST_CASE("green function limits, boundaries, and symmetries") {
    // vanishing advection reduces to the Laplace kernel
    CHECK(green_g0(0.5, 0.25, 0.0) == -0.125);
    CHECK(green_g0(0.5, 0.25, 1e-7) ==
          Catch::Approx(-0.12500000156249997396).margin(1e-15));

    // exact zeros on the boundary of the square
    CHECK(green_g0(0.0, 0.3, 2.0) == 0.0);
    CHECK(green_g0(1.0, 0.3, 2.0) == 0.0);
    CHECK(green_g0(0.4, 0.0, 2.0) == 0.0);
    CHECK(green_g0(0.4, 1.0, 2.0) == 0.0);
    CHECK(green_g0(0.4, 1.0, 2.0, G0Variant::paper_literal) == 0.0);
    CHECK(green_g0(0.0, 0.3, 2.0, G0Variant::paper_literal) == 0.0);

    // weighted symmetry e^{A xi} G(x, xi) = e^{A x} G(xi, x)
    const double bigA = 1.3;
    for (auto [x, xi] : {std::pair{0.3, 0.7}, std::pair{0.62, 0.18}}) {
        const double lhs = std::exp(bigA * xi) * green_g0(x, xi, bigA);
        const double rhs = std::exp(bigA * x) * green_g0(xi, x, bigA);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-13));
    }

    // the literal variant is the true kernel with field and source swapped
    for (auto [x, xi] : {std::pair{0.3, 0.7}, std::pair{0.85, 0.15}})
        CHECK(green_g0(x, xi, 2.4, G0Variant::paper_literal) ==
              green_g0(xi, x, 2.4, G0Variant::self_consistent));

    CHECK_THROWS_AS(green_g0(-0.1, 0.5, 1.0), validation_error);
    CHECK_THROWS_AS(green_g0(0.5, 1.5, 1.0), validation_error);
}

TEST_CASE("green integral reproduces an independent ODE solution") {
    const double bigA = g_half();
    auto f = [](double t) { return std::sin(pi * t); };

    // frozen from the ODE side: u(0.37) with u'' - A u' = sin(pi x), u(0)=u(1)=0
    const double expected = -0.080225738216022567072;
    CHECK(apply_green_g0(bigA, f, 0.37) == Catch::Approx(expected).margin(1e-12));

    // the transposed variant is measurably a different kernel
    CHECK(apply_green_g0(bigA, f, 0.37, G0Variant::paper_literal) ==
          Catch::Approx(-0.094645453961561628656).margin(1e-10));

    // full-grid agreement with the finite-difference oracle
    const std::size_t n = 201;
    const auto xs = linspace(0.0, 1.0, n);
    std::vector<double> fs(n);
    for (std::size_t i = 0; i < n; ++i) fs[i] = f(xs[i]);
    const auto u = bvp_oracle(bigA, fs, 0.0, 0.0);
    CHECK(u[74] == Catch::Approx(expected).margin(1e-8));
    double worst = 0.0;
    for (std::size_t i = 0; i < n; i += 8)
        worst = std::max(worst, std::abs(u[i] - apply_green_g0(bigA, f, xs[i])));
    CHECK(worst <= 1e-8);
}

TEST_CASE("boundary blend solves the homogeneous two-point problem") {
    const double bigA = g_half();
    CHECK(boundary_blend(bigA, 0.2, 0.3, 0.37) ==
          Catch::Approx(0.21896921032074843455).margin(1e-15));
    CHECK(boundary_blend(bigA, 0.2, 0.3, 0.0) == 0.2);
    CHECK(boundary_blend(bigA, 0.2, 0.3, 1.0) == 0.3);
    CHECK(boundary_blend(0.0, -1.0, 3.0, 0.25) == Catch::Approx(0.0).margin(1e-15));
    // extreme advection pushes the transition layer to the right end
    CHECK(boundary_blend(900.0, 0.0, 1.0, 0.5) ==
          Catch::Approx(std::exp(-450.0)).epsilon(1e-12));
}

TEST_CASE("bvp oracle reproduces closed-form solutions") {
    const std::size_t n = 41;

    std::vector<double> zeros(n, 0.0);
    auto u1 = bvp_oracle(2.0, zeros, 1.0, 1.0);
    for (double v : u1) CHECK(v == Catch::Approx(1.0).margin(1e-13));

    auto u2 = bvp_oracle(1.0, zeros, 0.0, 1.0);
    const auto xs = linspace(0.0, 1.0, n);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(u2[i] == Catch::Approx(std::expm1(xs[i]) / std::expm1(1.0)).margin(1e-9));

    std::vector<double> ones(n, 1.0);
    auto u3 = bvp_oracle(0.0, ones, 0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(u3[i] == Catch::Approx(0.5 * xs[i] * (xs[i] - 1.0)).margin(1e-11));

    CHECK_THROWS_AS(bvp_oracle(1.0, std::vector<double>(4, 0.0), 0.0, 0.0),
                    validation_error);
}

TEST_CASE("reduced ode coefficients carry the fractional gain") {
    auto spec = smooth_spec();
    const auto ode = make_reduced_ode(spec);
    CHECK(ode.bigA == Catch::Approx(1.7724538509055160273).epsilon(1e-15));
    CHECK(ode.gamma2_gain == Catch::Approx(1.7724538509055160273).epsilon(1e-15));
    CHECK(ode.caputo_gain == Catch::Approx(1.7724538509055160273).epsilon(1e-15));
    spec.alpha = 1.5;
    CHECK_THROWS_AS(make_reduced_ode(spec), validation_error);
}

TEST_CASE("assembled system keeps its structural invariants") {
    auto spec = smooth_spec();
    const std::size_t n = 17;
    const auto sys = assemble_fredholm(spec, n);

    REQUIRE(sys.nodes.size() == n);
    REQUIRE(sys.weights.size() == n);
    REQUIRE(sys.rhs.size() == n);
    CHECK(sys.nodes.front() == 0.0);
    CHECK(sys.nodes.back() == 1.0);

    // endpoint rows decouple: G0 vanishes there, so the trace values are pinned
    CHECK(sys.rhs.front() == spec.psi(0.0));
    CHECK(sys.rhs.back() == spec.phi2(0.0));
    for (std::size_t j = 0; j < n; ++j) {
        CHECK(sys.kernel_matrix.front()[j] == 0.0);
        CHECK(sys.kernel_matrix.back()[j] == 0.0);
    }

    // decoupled gluing: the kernel must vanish identically
    auto decoupled = spec;
    decoupled.gamma2 = 0.0;
    const auto sys0 = assemble_fredholm(decoupled, n);
    for (const auto& row : sys0.kernel_matrix)
        for (double v : row) CHECK(v == 0.0);

    CHECK_THROWS_AS(assemble_fredholm(spec, 8), validation_error);
    CHECK_THROWS_AS(assemble_fredholm(spec, 7), validation_error);
    auto broken = spec;
    broken.big_q = nullptr;
    CHECK_THROWS_AS(assemble_fredholm(broken, n), validation_error);
}

TEST_CASE("constant data produces a constant trace") {
    ProblemSpec spec;
    spec.alpha = 0.5;
    spec.gamma1 = 1.0;
    spec.gamma2 = 1.0;
    spec.phi1 = [](double) { return 0.3; };
    spec.phi2 = [](double) { return 0.3; };
    spec.psi = [](double) { return 0.3; };
    spec.big_q = [](double x, double t) {
        return std::exp(-x) * (1.0 + std::exp(-t));
    };
    const auto sol = solve_tau1(assemble_fredholm(spec, 33));
    for (double v : sol.values) CHECK(v == Catch::Approx(0.3).margin(1e-10));
}

TEST_CASE("zero data produces the zero trace exactly") {
    ProblemSpec spec;
    spec.alpha = 0.5;
    spec.gamma1 = 1.0;
    spec.gamma2 = 1.0;
    spec.phi1 = [](double) { return 0.0; };
    spec.phi2 = [](double) { return 0.0; };
    spec.psi = [](double) { return 0.0; };
    spec.big_q = [](double x, double t) {
        return std::exp(-x) * (1.0 + std::exp(-t));
    };
    const auto sol = solve_tau1(assemble_fredholm(spec, 17));
    CHECK(max_abs(sol.values) <= 1e-12);
}

TEST_CASE("decoupled system reduces to a pure quadrature") {
    auto spec = smooth_spec();
    spec.gamma2 = 0.0;
    const std::size_t n = 33;
    const auto sol = solve_tau1(assemble_fredholm(spec, n));

    // with gamma2 = 0 the trace is explicit:
    // tau(x) = blend(x) + int G0(x,t) * (-Gamma(alpha) psi'(t/2)) dt,
    // and psi'(t/2) = t for psi(x) = 0.2 + x^2
    const double gam = g_half();
    const double bigA = gam * spec.gamma1;
    auto forcing = [gam](double t) { return -gam * t; };
    const auto xs = linspace(0.0, 1.0, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double expected = boundary_blend(bigA, 0.2, 0.3, xs[i]) +
                                apply_green_g0(bigA, forcing, xs[i]);
        CHECK(sol.values[i] == Catch::Approx(expected).margin(1e-9));
    }
}

TEST_CASE("coupled solve is self-consistent under refinement and closure") {
    const auto spec = smooth_spec();
    const auto sol33 = solve_tau1(assemble_fredholm(spec, 33));
    const auto sol65 = solve_tau1(assemble_fredholm(spec, 65));

    CHECK(sol65.condition_estimate >= 1.0);
    CHECK(sol65.condition_estimate < 1e6);

    double gap = 0.0;
    for (std::size_t i = 0; i < 33; ++i)
        gap = std::max(gap, std::abs(sol33.values[i] - sol65.values[2 * i]));
    CHECK(gap <= 1e-6);

    // closure: feed the forcing built from the solved trace into the
    // independent finite-difference oracle and compare
    const std::size_t n = 65;
    const auto xs = linspace(0.0, 1.0, n);
    const CubicSpline tsp(xs, sol65.values);
    const double gam = g_half();
    const double bigA = gam * spec.gamma1;

    auto psi_deriv_half = [&](double t) {
        return derivative_of(spec.psi, 0.5 * t, 0.0, 0.5);
    };
    std::vector<double> f1(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = xs[i];
        double conv = 0.0;  // int_0^x tau'(t) Q(x,t) dt
        double pref = 0.0;  // int_0^x psi'(t/2) Q(x,t) dt
        for (std::size_t c = 0; c + 1 <= i; ++c) {
            conv += gauss_cell(gauss8(),
                               [&](double t) { return tsp.derivative(t) * spec.big_q(x, t); },
                               xs[c], xs[c + 1]);
            pref += gauss_cell(gauss8(),
                               [&](double t) { return psi_deriv_half(t) * spec.big_q(x, t); },
                               xs[c], xs[c + 1]);
        }
        f1[i] = gam * spec.gamma2 * conv -
                gam * (spec.gamma1 * psi_deriv_half(x) + spec.gamma2 * pref);
    }
    const auto closure = bvp_oracle(bigA, f1, spec.psi(0.0), spec.phi2(0.0));
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(closure[i] - sol65.values[i]));
    CHECK(worst <= 5e-6);
}

TEST_CASE("singular trace systems are reported, not solved") {
    const std::size_t n = 9;
    FredholmSystem sys;
    sys.nodes = linspace(0.0, 1.0, n);
    sys.weights = simpson_weights(n, 1.0 / static_cast<double>(n - 1));
    sys.rhs.assign(n, 1.0);
    sys.kernel_matrix.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        sys.kernel_matrix[i][i] = 1.0 / sys.weights[i]; // makes I - K diag(w) == 0
    CHECK_THROWS_AS(solve_tau1(sys), numeric_error);
}

TEST_CASE("trace derivatives recover the interface densities") {
    ProblemSpec spec;
    spec.alpha = 0.5;
    spec.gamma1 = 1.0;
    spec.gamma2 = 1.0;
    spec.phi1 = [](double y) { return y; };
    spec.phi2 = [](double y) { return 1.0 + y; };
    spec.psi = [](double x) { return x * x; };
    spec.big_q = [](double, double) { return 1.0; };

    const std::size_t n = 41;
    const auto xs = linspace(0.0, 1.0, n);
    std::vector<double> tau(n);
    for (std::size_t i = 0; i < n; ++i) tau[i] = xs[i] * xs[i];

    const auto nu = recover_nu(tau, spec);
    // tau'' = 2 so nu1 = 2 / Gamma(1/2); psi'(x/2) = x so nu2 = 2x - x = x
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(nu.nu1[i] == Catch::Approx(1.1283791670955125739).margin(1e-9));
        CHECK(nu.nu2[i] == Catch::Approx(xs[i]).margin(1e-9));
    }

    CHECK_THROWS_AS(recover_nu(std::vector<double>(4, 0.0), spec), validation_error);

    // tiny grids take the full-width stencil path
    std::vector<double> tau5 = {0.0, 0.0625, 0.25, 0.5625, 1.0};
    const auto nu5 = recover_nu(tau5, spec);
    CHECK(nu5.nu1[2] == Catch::Approx(1.1283791670955125739).margin(1e-9));
    CHECK(nu5.nu2[2] == Catch::Approx(0.5).margin(1e-9));
}
