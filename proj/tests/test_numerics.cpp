#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tricomi/numerics.hpp"

using namespace tricomi;

TEST_CASE("linspace hits both endpoints exactly") {
    const auto x = linspace(0.0, 1.0, 41);
    REQUIRE(x.front() == 0.0);
    REQUIRE(x.back() == 1.0);
    REQUIRE(x.size() == 41);
    REQUIRE(x[20] == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("Simpson weights integrate cubics exactly") {
    const std::size_t n = 21;
    const double h = 1.0 / double(n - 1);
    const auto w = simpson_weights(n, h);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = h * double(i);
        s += w[i] * x * x * x;
    }
    REQUIRE(s == Catch::Approx(0.25).margin(1e-15));
    REQUIRE_THROWS_AS(simpson_weights(10, 0.1), validation_error);
}

TEST_CASE("Gauss rules reach their polynomial degree") {
    // 8-point Gauss is exact through degree 15
    double s = 0.0;
    for (std::size_t q = 0; q < 8; ++q)
        s += gauss8().weights[q] * std::pow(gauss8().nodes[q], 15);
    REQUIRE(s == Catch::Approx(1.0 / 16.0).margin(1e-15));

    // 4-point Gauss exact through degree 7, applied on a shifted cell
    const double v = gauss_cell(gauss4(), [](double x) { return x * x * x * x * x * x * x; },
                                0.25, 0.75);
    const double exact = (std::pow(0.75, 8) - std::pow(0.25, 8)) / 8.0;
    REQUIRE(v == Catch::Approx(exact).margin(1e-15));
}

TEST_CASE("Fornberg weights reproduce the classical centered stencil") {
    const double h = 0.1;
    const std::vector<double> nodes{-2 * h, -h, 0.0, h, 2 * h};
    const auto w = fd_weights(0.0, nodes, 1);
    REQUIRE(w[0] == Catch::Approx(1.0 / (12 * h)).margin(1e-12));
    REQUIRE(w[1] == Catch::Approx(-8.0 / (12 * h)).margin(1e-12));
    REQUIRE(w[2] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(w[3] == Catch::Approx(8.0 / (12 * h)).margin(1e-12));
    REQUIRE(w[4] == Catch::Approx(-1.0 / (12 * h)).margin(1e-12));
}

TEST_CASE("grid derivatives are 4th order on smooth data") {
    const std::size_t n = 41;
    const double h = 1.0 / double(n - 1);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(2.0 * h * double(i));
    const auto d1 = derivative1(f, h);
    const auto d2 = derivative2(f, h);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = h * double(i);
        e1 = std::max(e1, std::abs(d1[i] - 2.0 * std::cos(2.0 * x)));
        e2 = std::max(e2, std::abs(d2[i] + 4.0 * std::sin(2.0 * x)));
    }
    REQUIRE(e1 < 1e-7);
    REQUIRE(e2 < 1e-6);
}

TEST_CASE("pointwise derivative of a callable, including near edges") {
    auto f = [](double x) { return std::sin(x); };
    REQUIRE(derivative_of(f, 0.5, 0.0, 1.0) == Catch::Approx(std::cos(0.5)).margin(1e-12));
    REQUIRE(derivative_of(f, 0.0, 0.0, 1.0) == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(derivative_of(f, 1.0, 0.0, 1.0) == Catch::Approx(std::cos(1.0)).margin(1e-10));
}

TEST_CASE("tridiagonal solver") {
    // A = [2 1 0; 1 2 1; 0 1 2], x = [1 2 3]  =>  b = [4, 8, 8]
    std::vector<double> lo{0, 1, 1}, di{2, 2, 2}, up{1, 1, 0}, rhs{4, 8, 8};
    solve_tridiagonal(lo, di, up, rhs);
    REQUIRE(rhs[0] == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(rhs[1] == Catch::Approx(2.0).margin(1e-14));
    REQUIRE(rhs[2] == Catch::Approx(3.0).margin(1e-14));
}

TEST_CASE("small dense solver with pivoting") {
    std::vector<std::vector<double>> a{{0.0, 2.0, 1.0}, {1.0, 1.0, 1.0}, {2.0, 0.0, 3.0}};
    // solution (1, 2, 3): b = (0+4+3, 1+2+3, 2+0+9)
    const auto x = solve_dense_small(a, {7.0, 6.0, 11.0});
    REQUIRE(x[0] == Catch::Approx(1.0).margin(1e-13));
    REQUIRE(x[1] == Catch::Approx(2.0).margin(1e-13));
    REQUIRE(x[2] == Catch::Approx(3.0).margin(1e-13));
}

TEST_CASE("not-a-knot spline reproduces cubics exactly") {
    auto poly = [](double x) { return x * x * x - 2.0 * x * x + x - 0.5; };
    auto dpoly = [](double x) { return 3.0 * x * x - 4.0 * x + 1.0; };
    const auto x = linspace(0.0, 1.0, 7);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = poly(x[i]);
    const CubicSpline s(x, y);
    for (double t : {0.0, 0.1234, 0.5, 0.876, 1.0}) {
        REQUIRE(s(t) == Catch::Approx(poly(t)).margin(1e-13));
        REQUIRE(s.derivative(t) == Catch::Approx(dpoly(t)).margin(1e-11));
    }
    // integral of x^3 - 2x^2 + x - 1/2 over [0,1] = 1/4 - 2/3 + 1/2 - 1/2 = -5/12
    REQUIRE(s.integral(0.0, 1.0) == Catch::Approx(-5.0 / 12.0).margin(1e-13));
    REQUIRE(s.integral(0.2, 0.7) ==
            Catch::Approx(s.integral(0.0, 0.7) - s.integral(0.0, 0.2)).margin(1e-14));
    REQUIRE(s.integral(0.7, 0.2) == Catch::Approx(-s.integral(0.2, 0.7)).margin(1e-14));
}

TEST_CASE("spline approximates smooth functions to 4th order") {
    const auto x = linspace(0.0, 1.0, 33);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::sin(3.0 * x[i]);
    const CubicSpline s(x, y);
    double err = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double t = k / 200.0;
        err = std::max(err, std::abs(s(t) - std::sin(3.0 * t)));
    }
    REQUIRE(err < 1e-6);
    REQUIRE(s.integral(0.0, 1.0) ==
            Catch::Approx((1.0 - std::cos(3.0)) / 3.0).margin(1e-8));
}

TEST_CASE("spline handles non-uniform nodes") {
    const std::vector<double> x{0.0, 0.05, 0.2, 0.45, 0.8, 1.0};
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * x[i] * x[i];
    const CubicSpline s(x, y);
    REQUIRE(s(0.6) == Catch::Approx(0.216).margin(1e-13));
    REQUIRE(s.integral(0.0, 1.0) == Catch::Approx(0.25).margin(1e-13));
}

TEST_CASE("power-basis fit recovers exact coefficients") {
    const std::vector<double> powers{0.0, 0.5, 1.5};
    const std::vector<double> t{0.0, 0.01, 0.02, 0.04};
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        v[i] = 2.0 + 3.0 * std::pow(t[i], 0.5) + 4.0 * std::pow(t[i], 1.5);
    v[0] = 2.0; // 0^0.5 terms vanish
    const auto c = power_basis_fit(t, v, powers);
    REQUIRE(c[0] == Catch::Approx(2.0).margin(1e-9));
    REQUIRE(c[1] == Catch::Approx(3.0).margin(1e-8));
    REQUIRE(c[2] == Catch::Approx(4.0).margin(1e-6));
}
