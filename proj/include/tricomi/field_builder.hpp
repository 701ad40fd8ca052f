#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tricomi/numerics.hpp"
#include "tricomi/problem.hpp"
#include "tricomi/special_functions.hpp"

namespace tricomi {

struct ResidualNorms {
    double max_norm = 0.0;
    double l2_norm = 0.0;
};

namespace detail {

// Evaluator instances are expensive to build (coefficient tables), cheap to
// keep. Field quadratures request the same parameters thousands of times.
inline const WrightEvaluator& cached_wright(const WrightParams& p) {
    thread_local std::vector<std::pair<WrightParams, WrightEvaluator>> cache;
    for (const auto& entry : cache)
        if (entry.first.beta == p.beta && entry.first.truncation == p.truncation &&
            entry.first.tail_tol == p.tail_tol)
            return entry.second;
    cache.emplace_back(p, WrightEvaluator(p));
    if (cache.size() > 8) cache.erase(cache.begin());
    return cache.back().second;
}

inline std::vector<double> graded_breakpoints(double length, std::size_t cells) {
    std::vector<double> b(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        const double r = static_cast<double>(i) / static_cast<double>(cells);
        b[i] = length * r * r * r;
    }
    return b;
}

// int_0^y eta^{-alpha} f(eta) d eta for smooth f. The weighted half near
// eta = 0 is regularized exactly by the substitution sigma = eta^{1-alpha};
// the rest is a plain graded composite rule.
template <class F>
double weighted_eta_integral(F&& f, double y, double alpha, std::size_t cells) {
    const double q = 1.0 / (1.0 - alpha);
    const double sa = std::pow(0.5 * y, 1.0 - alpha);
    double acc = 0.0;
    const auto ba = graded_breakpoints(sa, cells);
    for (std::size_t i = 0; i < cells; ++i)
        acc += gauss_cell(gauss4(),
                          [&](double sg) { return q * f(std::pow(sg, q)); },
                          ba[i], ba[i + 1]);
    const double lo = 0.5 * y;
    const double step = (y - lo) / static_cast<double>(cells);
    for (std::size_t i = 0; i < cells; ++i)
        acc += gauss_cell(gauss4(),
                          [&](double e) { return std::pow(e, -alpha) * f(e); },
                          lo + step * static_cast<double>(i),
                          lo + step * static_cast<double>(i + 1));
    return acc;
}

// Single-offset transformed heat kernel
//   (1/Gamma(1-alpha)) int_0^y eta^{-alpha} G1(d, y-eta) d eta,
// G1(d,s) = s^{beta-1}/2 * e(-|d|/s^beta), beta = alpha/2. Both endpoint
// singularities are absorbed exactly: sigma = eta^{1-alpha} near eta = 0 and
// sigma = (y-eta)^beta near eta = y (where the kernel prefactor cancels
// against the Jacobian). Graded panels cluster toward each substituted
// origin.
inline double gbar_once(double dx, double y, double alpha, const WrightEvaluator& ev,
                        std::size_t cells) {
    const double b = ev.beta();
    const double ad = std::abs(dx);
    if (ad >= ev.cutoff() * std::pow(y, b)) return 0.0;

    const double q = 1.0 / (1.0 - alpha);
    double acc = 0.0;

    // eta in [0, y/2]: sigma = eta^{1-alpha}
    const double sa = std::pow(0.5 * y, 1.0 - alpha);
    const auto ba = graded_breakpoints(sa, cells);
    auto fa = [&](double sg) {
        const double s = y - std::pow(sg, q);
        const double sb = std::pow(s, b);
        return q * 0.5 * std::pow(s, b - 1.0) * ev.kernel_value(-ad / sb);
    };
    for (std::size_t i = 0; i < cells; ++i) acc += gauss_cell(gauss4(), fa, ba[i], ba[i + 1]);

    // eta in [y/2, y]: sigma = (y-eta)^beta, prefactor cancels exactly
    const double sbmax = std::pow(0.5 * y, b);
    const auto bb = graded_breakpoints(sbmax, cells);
    auto fb = [&](double sg) {
        const double eta = y - std::pow(sg, 1.0 / b);
        return (0.5 / b) * std::pow(eta, -alpha) * ev.kernel_value(-ad / sg);
    };
    for (std::size_t i = 0; i < cells; ++i) acc += gauss_cell(gauss4(), fb, bb[i], bb[i + 1]);

    return reciprocal_gamma(1.0 - alpha) * acc;
}

// Image sum of a per-offset kernel gb over the reflection lattice,
// restricted to the radius 2*n_max. Selecting by radius rather than by index
// keeps the x <-> xi symmetry and makes the xi = 0 cancellation exact.
template <class GB>
double image_sum(double x, double xi, int n_max, GB&& gb) {
    const double radius = 2.0 * static_cast<double>(n_max);
    double acc = 0.0;
    for (int n = -n_max - 1; n <= n_max + 1; ++n) {
        const double shift = 2.0 * static_cast<double>(n);
        const double d1 = x - xi + shift;
        if (std::abs(d1) <= radius) acc += gb(d1);
        const double d2 = x + xi + shift;
        if (std::abs(d2) <= radius) acc -= gb(d2);
    }
    return acc;
}

} // namespace detail

struct GreenValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

// Green's function of the first boundary problem on the strip 0 < x < 1,
// image expansion truncated by radius with the omitted tail estimated from
// the outermost retained pair.
inline GreenValue green_parabolic_detail(double x, double y, double xi, double eta,
                                         const WrightParams& p, int n_max) {
    if (n_max < 1) throw validation_error("green_parabolic: n_max must be at least 1");
    if (!(eta < y)) throw validation_error("green_parabolic: eta must precede y");
    if (!(x >= 0.0 && x <= 1.0 && xi >= 0.0 && xi <= 1.0))
        throw validation_error("green_parabolic: x and xi must lie in [0,1]");
    const auto& ev = detail::cached_wright(p);
    const double s = y - eta;
    const double sb = std::pow(s, p.beta);
    const double pref = 0.5 * std::pow(s, p.beta - 1.0);

    const double radius = 2.0 * static_cast<double>(n_max);
    double acc = 0.0;
    double edge_d = -1.0, edge_mag = 0.0;   // largest retained |offset| and its size
    double edge2_d = -1.0, edge2_mag = 0.0; // second largest
    auto take = [&](double d, double sgn) {
        const double ad = std::abs(d);
        if (ad > radius) return;
        const double t = ev.kernel_value(-ad / sb);
        acc += sgn * t;
        if (ad > edge_d) {
            edge2_d = edge_d;
            edge2_mag = edge_mag;
            edge_d = ad;
            edge_mag = std::abs(t);
        } else if (ad > edge2_d) {
            edge2_d = ad;
            edge2_mag = std::abs(t);
        }
    };
    for (int n = -n_max - 1; n <= n_max + 1; ++n) {
        const double shift = 2.0 * static_cast<double>(n);
        take(x - xi + shift, 1.0);
        take(x + xi + shift, -1.0);
    }
    return GreenValue{pref * acc, pref * (edge_mag + edge2_mag)};
}

inline double green_parabolic(double x, double y, double xi, double eta,
                              const WrightParams& p, int n_max) {
    return green_parabolic_detail(x, y, xi, eta, p, n_max).value;
}

// Time-fractional weighting of the single-offset kernel. The argument is one
// image offset x - xi + 2n; the full interface kernel is the image_sum of
// this over the reflection lattice. The Wright order is always alpha/2 from
// the problem; p contributes the series budget and tail tolerance. Doubles
// the panel count once and escalates once more if the first two disagree.
inline double gbar(double dx, double y, const ProblemSpec& spec, const WrightParams& p,
                   std::size_t mesh_points = 32) {
    if (!(y > 0.0)) throw validation_error("gbar: y must be positive");
    if (!(spec.alpha > 0.0) || !(spec.alpha < 1.0))
        throw validation_error("alpha out of range (0,1)");
    if (mesh_points < 4) throw validation_error("gbar: too few mesh points");
    WrightParams wp = p;
    wp.beta = 0.5 * spec.alpha;
    const auto& ev = detail::cached_wright(wp);

    const double v1 = detail::gbar_once(dx, y, spec.alpha, ev, mesh_points);
    const double v2 = detail::gbar_once(dx, y, spec.alpha, ev, 2 * mesh_points);
    if (std::abs(v2 - v1) <= 1e-7 * std::max(1.0, std::abs(v2))) return v2;
    const double v3 = detail::gbar_once(dx, y, spec.alpha, ev, 4 * mesh_points);
    if (std::abs(v3 - v2) <= 1e-6 * std::max(1.0, std::abs(v3))) return v3;
    throw numeric_error("gbar quadrature did not converge");
}

namespace detail {

// int_0^y H(d, y-eta) phi(eta) d eta where H is the lateral-boundary flux
// kernel d/dxi G at xi in {0,1}:
//   H(d,s) = s^{-1} sum_n sign(d+2n) e'(-|d+2n|/s^beta).
// Substituting sigma = s^beta gives (1/beta) sigma^{-1} sum ... phi(y-s);
// the kernel kills the sigma -> 0 end superexponentially for d != 0.
inline double boundary_flux_once(double d, double y, const Fn1& phi, double alpha,
                                 const WrightEvaluator& ev, int n_max,
                                 std::size_t cells) {
    const double b = ev.beta();
    const double top = std::pow(y, b);
    const auto bp = graded_breakpoints(top, cells);
    const double radius = 2.0 * static_cast<double>(n_max);
    auto f = [&](double sg) {
        double ker = 0.0;
        for (int n = -n_max - 1; n <= n_max + 1; ++n) {
            const double off = d + 2.0 * static_cast<double>(n);
            const double ad = std::abs(off);
            if (ad > radius || ad == 0.0) continue;
            const double sgn = off > 0.0 ? 1.0 : -1.0;
            ker += sgn * ev.kernel_derivative(-ad / sg);
        }
        if (ker == 0.0) return 0.0;
        const double eta = y - std::pow(sg, 1.0 / b);
        return ker * phi(eta) / (b * sg);
    };
    double acc = 0.0;
    for (std::size_t i = 0; i < cells; ++i) acc += gauss_cell(gauss8(), f, bp[i], bp[i + 1]);
    return acc;
}

inline double boundary_flux(double d, double y, const Fn1& phi, double alpha,
                            const WrightEvaluator& ev, int n_max,
                            std::size_t mesh_points) {
    const double v1 = boundary_flux_once(d, y, phi, alpha, ev, n_max, mesh_points);
    const double v2 = boundary_flux_once(d, y, phi, alpha, ev, n_max, 2 * mesh_points);
    if (std::abs(v2 - v1) <= 1e-6 * std::max(1.0, std::abs(v2))) return v2;
    const double v3 = boundary_flux_once(d, y, phi, alpha, ev, n_max, 4 * mesh_points);
    if (std::abs(v3 - v2) <= 1e-5 * std::max(1.0, std::abs(v3))) return v3;
    throw numeric_error("boundary flux quadrature did not converge");
}

} // namespace detail

// Green's-representation evaluation of the parabolic field at one interior
// point: lateral flux integrals against phi1/phi2 plus the weighted-kernel
// integral against the interface trace.
inline double solve_plus(const ProblemSpec& spec, const TraceSet& trace, double x,
                         double y, const WrightParams& p = WrightParams{},
                         int n_max = 8, std::size_t mesh_points = 32) {
    if (!(x > 0.0 && x < 1.0 && y > 0.0 && y <= 1.0))
        throw validation_error("solve_plus expects an interior point of the parabolic domain");
    if (trace.tau1.size() < 4)
        throw validation_error("solve_plus needs the solved interface trace");
    if (!spec.phi1 || !spec.phi2)
        throw validation_error("solve_plus needs phi1 and phi2");
    WrightParams wp = p;
    wp.beta = 0.5 * spec.alpha;
    const auto& ev = detail::cached_wright(wp);

    const double u_phi1 = detail::boundary_flux(x, y, spec.phi1, spec.alpha, ev, n_max,
                                                mesh_points);
    const double u_phi2 = detail::boundary_flux(x - 1.0, y, spec.phi2, spec.alpha, ev,
                                                n_max, mesh_points);

    const CubicSpline tsp(linspace(0.0, 1.0, trace.tau1.size()), trace.tau1);
    auto gb = [&](double d) { return detail::gbar_once(d, y, spec.alpha, ev, mesh_points); };
    auto integrand = [&](double xi) {
        return detail::image_sum(x, xi, n_max, gb) * tsp(xi);
    };
    auto piece = [&](double a, double b, std::size_t cells) {
        double acc = 0.0;
        const double len = (b - a) / static_cast<double>(cells);
        for (std::size_t c = 0; c < cells; ++c)
            acc += gauss_cell(gauss8(), integrand, a + len * static_cast<double>(c),
                              a + len * static_cast<double>(c + 1));
        return acc;
    };
    const double u_tau = piece(0.0, x, 16) + piece(x, 1.0, 16);

    return u_phi1 - u_phi2 + u_tau;
}

// Same representation swept over a tensor grid. The trace is resampled onto
// the x nodes so every kernel offset lives on a lattice; per-level gbar
// values are memoized by (node distance, panel node, image index).
inline std::vector<std::vector<double>> solve_plus_grid(
    const ProblemSpec& spec, const TraceSet& trace, const GridSpec& grid,
    const WrightParams& p = WrightParams{}, int n_max = 8,
    std::size_t mesh_points = 32) {
    if (grid.nx < 5 || grid.ny_plus < 3)
        throw validation_error("solve_plus_grid: grid too small");
    if (trace.tau1.size() < 4)
        throw validation_error("solve_plus_grid needs the solved interface trace");
    if (!spec.phi1 || !spec.phi2)
        throw validation_error("solve_plus_grid needs phi1 and phi2");
    WrightParams wp = p;
    wp.beta = 0.5 * spec.alpha;
    const auto& ev = detail::cached_wright(wp);

    const std::size_t nx = grid.nx;
    const std::size_t ny = grid.ny_plus;
    const auto xs = linspace(0.0, 1.0, nx);
    const auto ys = linspace(0.0, 1.0, ny);

    std::vector<double> tau(nx);
    {
        const CubicSpline tsp(linspace(0.0, 1.0, trace.tau1.size()), trace.tau1);
        for (std::size_t i = 0; i < nx; ++i) tau[i] = tsp(xs[i]);
    }

    std::vector<std::vector<double>> field(ny, std::vector<double>(nx, 0.0));
    field[0] = tau;
    for (std::size_t m = 1; m < ny; ++m) {
        field[m][0] = spec.phi1(ys[m]);
        field[m][nx - 1] = spec.phi2(ys[m]);
    }

    const double hx = 1.0 / static_cast<double>(nx - 1);
    const auto& g4 = gauss4();
    const std::size_t q4 = g4.nodes.size();
    const CubicSpline tsp(xs, tau);

    // canonical panel-node values of tau, shared across levels
    std::vector<double> tau_panel((nx - 1) * q4);
    std::vector<double> xi_panel((nx - 1) * q4);
    for (std::size_t j = 0; j + 1 < nx; ++j)
        for (std::size_t q = 0; q < q4; ++q) {
            const double xi = hx * (static_cast<double>(j) + g4.nodes[q]);
            xi_panel[j * q4 + q] = xi;
            tau_panel[j * q4 + q] = tsp(xi);
        }

    for (std::size_t m = 1; m < ny; ++m) {
        const double y = ys[m];
        std::map<std::int64_t, double> memo;
        auto gb_keyed = [&](std::int64_t diff, std::size_t q, int n) {
            const std::int64_t key =
                ((diff + 4096) << 16) | static_cast<std::int64_t>(q << 8) |
                static_cast<std::int64_t>(n + 64);
            auto it = memo.find(key);
            if (it != memo.end()) return it->second;
            const double d = hx * static_cast<double>(diff) - hx * g4.nodes[q] +
                             2.0 * static_cast<double>(n);
            const double v = detail::gbar_once(d, y, spec.alpha, ev, mesh_points);
            memo.emplace(key, v);
            return v;
        };
        const double radius = 2.0 * static_cast<double>(n_max);
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const double x = xs[i];
            double u_tau = 0.0;
            for (std::size_t j = 0; j + 1 < nx; ++j) {
                const std::int64_t dif = static_cast<std::int64_t>(i) -
                                         static_cast<std::int64_t>(j);
                const std::int64_t sum = static_cast<std::int64_t>(i) +
                                         static_cast<std::int64_t>(j);
                for (std::size_t q = 0; q < q4; ++q) {
                    double ker = 0.0;
                    for (int n = -n_max - 1; n <= n_max + 1; ++n) {
                        const double shift = 2.0 * static_cast<double>(n);
                        if (std::abs(x - xi_panel[j * q4 + q] + shift) <= radius)
                            ker += gb_keyed(dif, q, n);
                        if (std::abs(x + xi_panel[j * q4 + q] + shift) <= radius)
                            ker -= gb_keyed(sum, q, n);
                    }
                    u_tau += hx * g4.weights[q] * ker * tau_panel[j * q4 + q];
                }
            }
            const double f1 = detail::boundary_flux(x, y, spec.phi1, spec.alpha, ev,
                                                    n_max, mesh_points);
            const double f2 = detail::boundary_flux(x - 1.0, y, spec.phi2, spec.alpha,
                                                    ev, n_max, mesh_points);
            field[m][i] = f1 - f2 + u_tau;
        }
    }
    return field;
}

// Implicit history-stepping oracle for the parabolic branch: second-order
// centered u_xx, one-sided fractional history in y, tridiagonal solve per
// level. Runs on an internally refined y ladder and subsamples back.
inline std::vector<std::vector<double>> fd_oracle_plus(const ProblemSpec& spec,
                                                       const std::vector<double>& tau1,
                                                       const GridSpec& grid,
                                                       std::size_t refine = 4) {
    if (grid.nx < 5 || grid.ny_plus < 3)
        throw validation_error("fd_oracle_plus: grid too small");
    if (tau1.size() < 4) throw validation_error("fd_oracle_plus needs the initial trace");
    if (!spec.phi1 || !spec.phi2) throw validation_error("fd_oracle_plus needs phi1, phi2");
    if (refine < 1) refine = 1;

    const std::size_t nx = grid.nx;
    const std::size_t levels = (grid.ny_plus - 1) * refine + 1;
    const double hx = 1.0 / static_cast<double>(nx - 1);
    const double dy = 1.0 / static_cast<double>(levels - 1);
    const auto xs = linspace(0.0, 1.0, nx);

    std::vector<double> u0(nx);
    {
        const CubicSpline tsp(linspace(0.0, 1.0, tau1.size()), tau1);
        for (std::size_t i = 0; i < nx; ++i) u0[i] = tsp(xs[i]);
    }

    const auto bcoef = l1_coefficients(levels, spec.alpha);
    const double cgain =
        std::pow(dy, -spec.alpha) / std::tgamma(2.0 - spec.alpha);

    std::vector<std::vector<double>> hist;
    hist.reserve(levels);
    hist.push_back(u0);

    const std::size_t mi = nx - 2;
    std::vector<double> lo(mi), di(mi), up(mi), rh(mi);
    for (std::size_t m = 1; m < levels; ++m) {
        const double y = dy * static_cast<double>(m);
        const double bl = spec.phi1(y);
        const double br = spec.phi2(y);
        for (std::size_t i = 0; i < mi; ++i) {
            lo[i] = -1.0 / (hx * hx);
            di[i] = cgain + 2.0 / (hx * hx);
            up[i] = -1.0 / (hx * hx);
            double hsum = 0.0;
            for (std::size_t k = 1; k < m; ++k)
                hsum += bcoef[k] * (hist[m - k][i + 1] - hist[m - k - 1][i + 1]);
            rh[i] = cgain * (hist[m - 1][i + 1] - hsum / 1.0);
        }
        // fold Dirichlet values into the first and last interior equations
        rh[0] += bl / (hx * hx);
        rh[mi - 1] += br / (hx * hx);
        lo[0] = 0.0;
        up[mi - 1] = 0.0;
        solve_tridiagonal(lo, di, up, rh);
        std::vector<double> row(nx);
        row[0] = bl;
        row[nx - 1] = br;
        std::copy(rh.begin(), rh.end(), row.begin() + 1);
        hist.push_back(std::move(row));
    }

    std::vector<std::vector<double>> out;
    out.reserve(grid.ny_plus);
    for (std::size_t m = 0; m < grid.ny_plus; ++m) out.push_back(hist[m * refine]);
    return out;
}

// d'Alembert evaluation in the wave region from sampled interface traces.
// The nu2 antiderivative is taken exactly on the cubic interpolant.
inline double solve_minus(const std::vector<double>& tau,
                          const std::vector<double>& nu2, double x, double y) {
    if (tau.size() < 2 || tau.size() != nu2.size())
        throw validation_error("solve_minus needs matching trace samples");
    const double eps = 1e-12;
    if (y > eps || y < -0.5 - eps || x < -y - eps || x > 1.0 + y + eps)
        throw validation_error("solve_minus: point outside the wave region");
    const double a = std::clamp(x + y, 0.0, 1.0);
    const double b = std::clamp(x - y, 0.0, 1.0);
    const auto xs = linspace(0.0, 1.0, tau.size());
    const CubicSpline tsp(xs, tau);
    const CubicSpline nsp(xs, nu2);
    return 0.5 * (tsp(a) + tsp(b)) + 0.5 * nsp.integral(b, a);
}

// Interior wave-operator residual u_xx - u_yy on a rectangular patch of
// samples with spacings hx, hy.
inline ResidualNorms fd_oracle_minus(const std::vector<std::vector<double>>& vals,
                                     double hx, double hy) {
    const std::size_t rows = vals.size();
    if (rows < 3 || vals[0].size() < 3)
        throw validation_error("fd_oracle_minus needs at least a 3x3 patch");
    const std::size_t cols = vals[0].size();
    for (const auto& r : vals)
        if (r.size() != cols) throw validation_error("fd_oracle_minus: ragged patch");
    ResidualNorms out;
    double ssq = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 1; r + 1 < rows; ++r)
        for (std::size_t c = 1; c + 1 < cols; ++c) {
            const double uxx = (vals[r][c + 1] - 2.0 * vals[r][c] + vals[r][c - 1]) / (hx * hx);
            const double uyy = (vals[r + 1][c] - 2.0 * vals[r][c] + vals[r - 1][c]) / (hy * hy);
            const double res = uxx - uyy;
            out.max_norm = std::max(out.max_norm, std::abs(res));
            ssq += res * res;
            ++count;
        }
    out.l2_norm = std::sqrt(ssq / static_cast<double>(count));
    return out;
}

} // namespace tricomi
