#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "tricomi/numerics.hpp"
#include "tricomi/problem.hpp"

namespace tricomi {

// Which closed form of the one-dimensional Green's function to use. The
// self-consistent variant satisfies u'' - A u' = F, u(0) = u(1) = 0 exactly
// (checked against an independent ODE integration); the literal variant
// reproduces a published transposed form, kept selectable for comparison.
// The two are related by swapping the field point and the source point.
enum class G0Variant { self_consistent, paper_literal };

namespace detail {

// True Green's function of u'' - A u' with homogeneous Dirichlet ends,
// evaluated at field point x and source xi. Three regimes keep every
// exponential argument nonpositive so nothing overflows:
//   |A| <= 1e-6      second-order series around the Laplace kernel
//   1e-6 < |A| <= 30 expm1 products (no cancellation at this scale)
//   A > 30           expanded exponential differences
//   A < -30          reflection G(x, xi; A) = G(1-x, 1-xi; -A)
inline double green_g0_core(double x, double xi, double bigA) {
    if (x == 0.0 || x == 1.0 || xi == 0.0 || xi == 1.0) return 0.0;
    const double A = bigA;
    if (std::abs(A) <= 1e-6) {
        const double base = (xi <= x) ? xi * (x - 1.0) : x * (xi - 1.0);
        return base * (1.0 + 0.5 * A * (x - xi));
    }
    if (A < -30.0) return green_g0_core(1.0 - x, 1.0 - xi, -A);
    const double den = A * std::expm1(-A);
    if (A <= 30.0) {
        if (xi <= x)
            return std::expm1(-A * xi) * std::expm1(A * (x - 1.0)) / den;
        return std::expm1(A * x) * (std::expm1(-A * xi) - std::expm1(-A)) / den;
    }
    if (xi <= x)
        return (std::exp(A * (x - 1.0 - xi)) - std::exp(-A * xi) -
                std::exp(A * (x - 1.0)) + 1.0) / den;
    return (std::exp(A * (x - xi)) - std::exp(A * (x - 1.0)) -
            std::exp(-A * xi) + std::exp(-A)) / den;
}

// Derivative at t of the four cubic Lagrange basis polynomials over the
// nodes xs. The mean is subtracted so the four values sum to exactly zero,
// which makes the interpolant of a constant have an exactly zero derivative.
inline std::array<double, 4> cubic_basis_derivative(const std::array<double, 4>& xs,
                                                    double t) {
    std::array<double, 4> d{};
    for (int m = 0; m < 4; ++m) {
        double denom = 1.0;
        for (int r = 0; r < 4; ++r)
            if (r != m) denom *= xs[m] - xs[r];
        double sum = 0.0;
        for (int p = 0; p < 4; ++p) {
            if (p == m) continue;
            double prod = 1.0;
            for (int r = 0; r < 4; ++r)
                if (r != m && r != p) prod *= t - xs[r];
            sum += prod;
        }
        d[m] = sum / denom;
    }
    const double mean = 0.25 * (d[0] + d[1] + d[2] + d[3]);
    for (auto& v : d) v -= mean;
    return d;
}

} // namespace detail

inline double green_g0(double x, double xi, double bigA,
                       G0Variant variant = G0Variant::self_consistent) {
    if (!(x >= 0.0 && x <= 1.0) || !(xi >= 0.0 && xi <= 1.0))
        throw validation_error("green_g0: arguments must lie in [0,1]");
    if (variant == G0Variant::paper_literal)
        return detail::green_g0_core(xi, x, bigA);
    return detail::green_g0_core(x, xi, bigA);
}

// Solution of u'' - A u' = 0 with u(0) = left, u(1) = right. Endpoint
// values are returned exactly.
inline double boundary_blend(double bigA, double left, double right, double x) {
    if (x == 0.0) return left;
    if (x == 1.0) return right;
    if (bigA == 0.0) return left + (right - left) * x;
    if (bigA > 500.0) return left + (right - left) * std::exp(bigA * (x - 1.0));
    if (bigA < -500.0) return left - (right - left) * std::expm1(bigA * x);
    return left + (right - left) * std::expm1(bigA * x) / std::expm1(bigA);
}

// Coefficients of the reduced two-point problem on the parabolic-hyperbolic
// interface: tau'' - bigA tau' = forcing, with bigA and the forcing gains
// scaled by Gamma(alpha) from the gluing condition.
struct ReducedOde {
    double bigA = 0.0;        // Gamma(alpha) * gamma1
    double gamma2_gain = 0.0; // Gamma(alpha) * gamma2
    double caputo_gain = 0.0; // Gamma(alpha)
};

inline ReducedOde make_reduced_ode(const ProblemSpec& spec) {
    if (!(spec.alpha > 0.0) || !(spec.alpha < 1.0))
        throw validation_error("alpha out of range (0,1)");
    const double g = std::tgamma(spec.alpha);
    return ReducedOde{g * spec.gamma1, g * spec.gamma2, g};
}

// Integral of green_g0(x, xi) * f(xi) over xi in [0,1], split at the
// derivative kink xi = x. Composite Gauss panels on each smooth piece.
inline double apply_green_g0(double bigA, const Fn1& f, double x,
                             G0Variant variant = G0Variant::self_consistent,
                             std::size_t cells_per_side = 24) {
    if (!(x >= 0.0 && x <= 1.0))
        throw validation_error("apply_green_g0: x must lie in [0,1]");
    auto piece = [&](double a, double b) {
        double acc = 0.0;
        const double len = (b - a) / static_cast<double>(cells_per_side);
        for (std::size_t c = 0; c < cells_per_side; ++c) {
            const double ca = a + len * static_cast<double>(c);
            acc += gauss_cell(gauss8(),
                              [&](double t) { return green_g0(x, t, bigA, variant) * f(t); },
                              ca, ca + len);
        }
        return acc;
    };
    double total = 0.0;
    if (x > 0.0) total += piece(0.0, x);
    if (x < 1.0) total += piece(x, 1.0);
    return total;
}

// Discrete trace equation (I - K diag(weights)) tau1 = rhs on uniform nodes.
// kernel_matrix holds the effective Nystrom kernel: multiplying column j by
// weights[j] reproduces the discrete integral operator. It is identically
// zero when gamma2 vanishes.
struct FredholmSystem {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<std::vector<double>> kernel_matrix;
    std::vector<double> rhs;
};

// Builds the trace equation by applying the integral operator exactly to a
// piecewise-cubic nodal interpolant instead of sampling a parts-integrated
// kernel. The operator acting on tau is
//     (T tau)(x) = g2 * int_0^1 G0(x,s) [ int_0^s tau'(t) Q(s,t) dt ] ds,
// with g2 = Gamma(alpha) gamma2. Outer integration uses per-cell Gauss
// panels aligned with the nodes so the kink of G0 always falls on a panel
// boundary; inner prefix integrals run over whole cells plus one partial
// cell. Constants are annihilated exactly and the right-hand side keeps
// tau(0) = psi(0), tau(1) = phi2(0) structurally because G0 vanishes at the
// endpoint rows.
inline FredholmSystem assemble_fredholm(const ProblemSpec& spec, std::size_t n) {
    if (n < 9 || n % 2 == 0)
        throw validation_error("assemble_fredholm: node count must be odd and at least 9");
    if (!(spec.alpha > 0.0) || !(spec.alpha < 1.0))
        throw validation_error("alpha out of range (0,1)");
    if (spec.gamma1 == 0.0 && spec.gamma2 == 0.0)
        throw validation_error("gluing coefficients gamma1 and gamma2 are both zero");
    if (!spec.psi || !spec.phi2)
        throw validation_error("trace reduction needs psi and phi2");
    const bool coupled = spec.gamma2 != 0.0;
    if (coupled && !spec.big_q)
        throw validation_error("trace reduction needs the gluing kernel Q when gamma2 is nonzero");

    const double gam = std::tgamma(spec.alpha);
    const double bigA = gam * spec.gamma1;
    const double g2 = gam * spec.gamma2;

    FredholmSystem sys;
    sys.nodes = linspace(0.0, 1.0, n);
    const double h = 1.0 / static_cast<double>(n - 1);
    sys.weights = simpson_weights(n, h);
    sys.rhs.assign(n, 0.0);
    sys.kernel_matrix.assign(n, std::vector<double>(n, 0.0));

    const double psi0 = spec.psi(0.0);
    const double phi20 = spec.phi2(0.0);

    auto psi_half_deriv = [&spec](double t) {
        return derivative_of(spec.psi, 0.5 * t, 0.0, 0.5);
    };

    const GaussRule& gl = gauss8();
    const std::size_t q8 = gl.nodes.size();
    const std::size_t cells = n - 1;

    // Inner-cell quadrature data reused by every outer point further right:
    // abscissas, weights, psi'(t/2), and the four basis derivatives of the
    // cell's cubic stencil.
    std::vector<std::size_t> stencil(cells);
    std::vector<double> in_t(cells * q8), in_w(cells * q8), in_pd(cells * q8);
    std::vector<std::array<double, 4>> in_dl(cells * q8);
    for (std::size_t c = 0; c < cells; ++c) {
        const std::size_t st = std::min(c > 0 ? c - 1 : 0, n - 4);
        stencil[c] = st;
        const std::array<double, 4> xs = {sys.nodes[st], sys.nodes[st + 1],
                                          sys.nodes[st + 2], sys.nodes[st + 3]};
        for (std::size_t q = 0; q < q8; ++q) {
            const std::size_t idx = c * q8 + q;
            const double t = sys.nodes[c] + h * gl.nodes[q];
            in_t[idx] = t;
            in_w[idx] = h * gl.weights[q];
            in_pd[idx] = coupled ? psi_half_deriv(t) : 0.0;
            in_dl[idx] = detail::cubic_basis_derivative(xs, t);
        }
    }

    Eigen::MatrixXd opmat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(n));
    Eigen::VectorXd fquad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd gcol(static_cast<Eigen::Index>(n));
    std::vector<double> vrow(n);

    for (std::size_t k = 0; k < cells; ++k) {
        const std::size_t stk = stencil[k];
        const std::array<double, 4> xsk = {sys.nodes[stk], sys.nodes[stk + 1],
                                           sys.nodes[stk + 2], sys.nodes[stk + 3]};
        for (std::size_t q = 0; q < q8; ++q) {
            const double s = sys.nodes[k] + h * gl.nodes[q];
            const double wout = h * gl.weights[q];

            double prefix = 0.0; // int_0^s psi'(t/2) Q(s,t) dt
            if (coupled) {
                std::fill(vrow.begin(), vrow.end(), 0.0);
                for (std::size_t c = 0; c < k; ++c) {
                    for (std::size_t q2 = 0; q2 < q8; ++q2) {
                        const std::size_t idx = c * q8 + q2;
                        const double qv = spec.big_q(s, in_t[idx]);
                        const double w2 = in_w[idx];
                        const auto& dl = in_dl[idx];
                        for (std::size_t m = 0; m < 4; ++m)
                            vrow[stencil[c] + m] += w2 * dl[m] * qv;
                        prefix += w2 * in_pd[idx] * qv;
                    }
                }
                const double len = s - sys.nodes[k];
                for (std::size_t q2 = 0; q2 < q8; ++q2) {
                    const double t = sys.nodes[k] + len * gl.nodes[q2];
                    const double w2 = len * gl.weights[q2];
                    const double qv = spec.big_q(s, t);
                    const auto dl = detail::cubic_basis_derivative(xsk, t);
                    for (std::size_t m = 0; m < 4; ++m)
                        vrow[stk + m] += w2 * dl[m] * qv;
                    prefix += w2 * psi_half_deriv(t) * qv;
                }
            }

            const double spart =
                -gam * (spec.gamma1 * psi_half_deriv(s) + spec.gamma2 * prefix);
            for (std::size_t i = 0; i < n; ++i)
                gcol(static_cast<Eigen::Index>(i)) = green_g0(sys.nodes[i], s, bigA);
            fquad += (wout * spart) * gcol;
            if (coupled) {
                Eigen::Map<const Eigen::VectorXd> vm(vrow.data(),
                                                     static_cast<Eigen::Index>(n));
                opmat.noalias() += (g2 * wout) * gcol * vm.transpose();
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        sys.rhs[i] = boundary_blend(bigA, psi0, phi20, sys.nodes[i]) +
                     fquad(static_cast<Eigen::Index>(i));
    if (coupled)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                sys.kernel_matrix[i][j] =
                    opmat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /
                    sys.weights[j];
    return sys;
}

struct Tau1Solution {
    std::vector<double> values;
    double condition_estimate = 0.0;
};

inline Tau1Solution solve_tau1(const FredholmSystem& sys) {
    const std::size_t n = sys.nodes.size();
    if (n == 0 || sys.rhs.size() != n || sys.weights.size() != n ||
        sys.kernel_matrix.size() != n)
        throw validation_error("solve_tau1: inconsistent system sizes");
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (sys.kernel_matrix[i].size() != n)
            throw validation_error("solve_tau1: inconsistent system sizes");
        for (std::size_t j = 0; j < n; ++j)
            b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -=
                sys.kernel_matrix[i][j] * sys.weights[j];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    const double rc = lu.rcond();
    if (!(rc > 1e-12))
        throw numeric_error(
            "trace equation is numerically singular (condition estimate exceeds 1e12); "
            "check the gluing coefficients and kernel against the uniqueness hypotheses");
    Eigen::VectorXd f(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) f(static_cast<Eigen::Index>(i)) = sys.rhs[i];
    const Eigen::VectorXd t = lu.solve(f);
    Tau1Solution out;
    out.values.assign(t.data(), t.data() + n);
    out.condition_estimate = 1.0 / rc;
    for (double v : out.values)
        if (!std::isfinite(v)) throw numeric_error("trace solve produced nonfinite values");
    return out;
}

struct NuRecovery {
    std::vector<double> nu1; // fractional-trace density on y = 0 from above
    std::vector<double> nu2; // wave-side normal trace on y = 0 from below
};

// nu1 = tau1'' / Gamma(alpha), nu2 = tau1' - psi'(x/2), from uniform samples.
inline NuRecovery recover_nu(const std::vector<double>& tau1, const ProblemSpec& spec) {
    const std::size_t n = tau1.size();
    if (n < 5) throw validation_error("recover_nu needs at least 5 samples");
    if (!spec.psi) throw validation_error("recover_nu needs psi");
    if (!(spec.alpha > 0.0) || !(spec.alpha < 1.0))
        throw validation_error("alpha out of range (0,1)");
    const double h = 1.0 / static_cast<double>(n - 1);

    std::vector<double> d1, d2;
    if (n >= 7) {
        d1 = derivative1(tau1, h);
        d2 = derivative2(tau1, h);
    } else {
        // tiny grids: one full-width stencil per point
        std::vector<double> nodes(n);
        for (std::size_t k = 0; k < n; ++k) nodes[k] = h * static_cast<double>(k);
        d1.resize(n);
        d2.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto w1 = fd_weights(nodes[i], nodes, 1);
            const auto w2 = fd_weights(nodes[i], nodes, 2);
            double s1 = 0.0, s2 = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                s1 += w1[k] * tau1[k];
                s2 += w2[k] * tau1[k];
            }
            d1[i] = s1;
            d2[i] = s2;
        }
    }

    const double gam = std::tgamma(spec.alpha);
    NuRecovery out;
    out.nu1.resize(n);
    out.nu2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = h * static_cast<double>(i);
        out.nu1[i] = d2[i] / gam;
        out.nu2[i] = d1[i] - derivative_of(spec.psi, 0.5 * x, 0.0, 0.5);
    }
    return out;
}

// Independent finite-difference check for u'' - A u' = F on [0,1] with
// u(0) = a, u(1) = b. Second-order scheme on a fine internal grid plus one
// Richardson step, then resampled onto the caller's nodes. Shares nothing
// with the Green's-function path.
inline std::vector<double> bvp_oracle(double bigA, const std::vector<double>& forcing,
                                      double a, double b) {
    const std::size_t n = forcing.size();
    if (n < 5) throw validation_error("bvp_oracle needs at least 5 forcing samples");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(bigA))
        throw validation_error("bvp_oracle: nonfinite input");

    const auto xs = linspace(0.0, 1.0, n);
    const CubicSpline fsp(xs, forcing);

    auto solve_grid = [&](std::size_t m) {
        const double hh = 1.0 / static_cast<double>(m - 1);
        const std::size_t mi = m - 2;
        std::vector<double> lo(mi), di(mi), up(mi), rh(mi);
        const double cl = 1.0 / (hh * hh) + 0.5 * bigA / hh;
        const double cu = 1.0 / (hh * hh) - 0.5 * bigA / hh;
        for (std::size_t i = 0; i < mi; ++i) {
            lo[i] = cl;
            di[i] = -2.0 / (hh * hh);
            up[i] = cu;
            rh[i] = fsp(hh * static_cast<double>(i + 1));
        }
        rh[0] -= cl * a;
        rh[mi - 1] -= cu * b;
        lo[0] = 0.0;
        up[mi - 1] = 0.0;
        solve_tridiagonal(lo, di, up, rh);
        std::vector<double> u(m);
        u[0] = a;
        u[m - 1] = b;
        std::copy(rh.begin(), rh.end(), u.begin() + 1);
        return u;
    };

    const std::size_t base = std::max<std::size_t>(513, n) | 1u;
    const auto uc = solve_grid(base);
    const auto uf = solve_grid(2 * base - 1);
    std::vector<double> ur(base);
    for (std::size_t i = 0; i < base; ++i)
        ur[i] = (4.0 * uf[2 * i] - uc[i]) / 3.0;
    ur[0] = a;
    ur[base - 1] = b;

    const CubicSpline usp(linspace(0.0, 1.0, base), ur);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = usp(xs[i]);
    out[0] = a;
    out[n - 1] = b;
    return out;
}

} // namespace tricomi
