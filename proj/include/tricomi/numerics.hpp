#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tricomi {

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Thrown for malformed problem data, grids, or configs; maps to exit code 1.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a numerical procedure cannot deliver its accuracy contract
// (series divergence, singular linear system, quadrature outside its certified
// domain); maps to exit code 2.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n < 2) throw validation_error("linspace needs at least 2 points");
    std::vector<double> x(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) x[i] = a + h * static_cast<double>(i);
    x.back() = b;
    return x;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double rms(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

// Composite Simpson weights for an odd number of uniform nodes.
inline std::vector<double> simpson_weights(std::size_t n, double h) {
    if (n < 3 || n % 2 == 0)
        throw validation_error("Simpson rule needs an odd node count >= 3, got " +
                               std::to_string(n));
    std::vector<double> w(n, h / 3.0);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] *= (i % 2 == 1) ? 4.0 : 2.0;
    return w;
}

// Gauss-Legendre rules on [0,1], nodes ascending.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline const GaussRule& gauss4() {
    static const GaussRule r{
        {0.06943184420297371239, 0.33000947820757186760,
         0.66999052179242813240, 0.93056815579702628761},
        {0.17392742256872692869, 0.32607257743127307131,
         0.32607257743127307131, 0.17392742256872692869}};
    return r;
}

inline const GaussRule& gauss8() {
    static const GaussRule r{
        {0.01985507175123188415, 0.10166676129318663020,
         0.23723379504183550710, 0.40828267875217509753,
         0.59171732124782490247, 0.76276620495816449290,
         0.89833323870681336980, 0.98014492824876811585},
        {0.05061426814518812957, 0.11119051722668723527,
         0.15685332293894364367, 0.18134189168918099148,
         0.18134189168918099148, 0.15685332293894364367,
         0.11119051722668723527, 0.05061426814518812957}};
    return r;
}

// Integrates f over [a,b] with one application of the given rule.
template <class F>
double gauss_cell(const GaussRule& rule, F&& f, double a, double b) {
    const double len = b - a;
    double s = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        s += rule.weights[q] * f(a + len * rule.nodes[q]);
    return s * len;
}

// Finite-difference weights for the m-th derivative at z from arbitrary nodes
// (Fornberg's recurrence). Returns one weight per node.
inline std::vector<double> fd_weights(double z, const std::vector<double>& x,
                                      std::size_t m) {
    const std::size_t n = x.size();
    if (n <= m) throw validation_error("fd_weights: need more nodes than derivative order");
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    c[0][0] = 1.0;
    double c1 = 1.0;
    double c4 = x[0] - z;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

namespace detail {

// Derivative of sampled values on a uniform grid from sliding 6- or 7-point
// stencils (clamped at the edges), 5th-order accurate for both orders.
inline std::vector<double> uniform_derivative(const std::vector<double>& f, double h,
                                              std::size_t order) {
    const std::size_t n = f.size();
    const std::size_t width = (order == 1) ? 6 : 7;
    if (n < width)
        throw validation_error("uniform_derivative: grid too small for the stencil");
    std::vector<double> out(n, 0.0);
    std::vector<double> nodes(width);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t start = (i >= width / 2) ? i - width / 2 : 0;
        start = std::min(start, n - width);
        for (std::size_t k = 0; k < width; ++k)
            nodes[k] = h * static_cast<double>(start + k);
        const auto w = fd_weights(h * static_cast<double>(i), nodes, order);
        double s = 0.0;
        for (std::size_t k = 0; k < width; ++k) s += w[k] * f[start + k];
        out[i] = s;
    }
    return out;
}

} // namespace detail

inline std::vector<double> derivative1(const std::vector<double>& f, double h) {
    return detail::uniform_derivative(f, h, 1);
}

inline std::vector<double> derivative2(const std::vector<double>& f, double h) {
    return detail::uniform_derivative(f, h, 2);
}

// 6th-order first derivative of a callable, with the 7-point stencil shifted
// to stay inside [lo, hi].
template <class F>
double derivative_of(F&& f, double x, double lo, double hi, double h = 1e-4) {
    h = std::min(h, (hi - lo) / 7.0);
    double start = x - 3.0 * h;
    if (start < lo) start = lo;
    if (start + 6.0 * h > hi) start = hi - 6.0 * h;
    std::vector<double> nodes(7);
    for (int k = 0; k < 7; ++k) nodes[k] = start + h * k;
    const auto w = fd_weights(x, nodes, 1);
    double s = 0.0;
    for (int k = 0; k < 7; ++k) s += w[k] * f(nodes[k]);
    return s;
}

// Solves a tridiagonal system in place (Thomas algorithm). lower[0] and
// upper[n-1] are ignored.
inline void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                              std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n)
        throw validation_error("solve_tridiagonal: inconsistent band sizes");
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0) throw numeric_error("tridiagonal solve hit a zero pivot");
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0) throw numeric_error("tridiagonal solve hit a zero pivot");
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Dense Gaussian elimination with partial pivoting for the small fitting
// systems (n <= 8). Returns the solution.
inline std::vector<double> solve_dense_small(std::vector<std::vector<double>> a,
                                             std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300)
            throw numeric_error("singular matrix in small dense solve");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = a[r][col] / a[col][col];
            if (m == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
            b[r] -= m * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Natural cubic interpolation with not-a-knot end conditions. Stores node
// second derivatives; evaluation, differentiation and exact integration of
// the piecewise cubic follow from them.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n != y_.size() || n < 2)
            throw validation_error("cubic spline needs matching arrays of >= 2 points");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i + 1] > x_[i]))
                throw validation_error("cubic spline nodes must be strictly increasing");
        m_.assign(n, 0.0);
        if (n == 2) return;              // linear segment, curvature stays zero
        if (n == 3) { build_natural_three(); return; }
        build_not_a_knot();
    }

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }

    double operator()(double t) const {
        const std::size_t i = cell(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

    double derivative(double t) const {
        const std::size_t i = cell(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h +
               ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
    }

    // Exact integral of the piecewise cubic over [a, b] within the node range.
    double integral(double a, double b) const {
        double sign = 1.0;
        if (b < a) { std::swap(a, b); sign = -1.0; }
        const std::size_t ia = cell(a);
        const std::size_t ib = cell(b);
        if (ia == ib) return sign * (prefix_in_cell(ia, b) - prefix_in_cell(ia, a));
        double s = prefix_in_cell(ia, x_[ia + 1]) - prefix_in_cell(ia, a);
        for (std::size_t i = ia + 1; i < ib; ++i) s += prefix_in_cell(i, x_[i + 1]);
        s += prefix_in_cell(ib, b);
        return sign * s;
    }

private:
    std::vector<double> x_, y_, m_;

    std::size_t cell(double t) const {
        const double eps = 1e-12 * (1.0 + std::abs(x_.front()) + std::abs(x_.back()));
        if (t < x_.front() - eps || t > x_.back() + eps)
            throw numeric_error("cubic spline evaluated outside its node range");
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        return std::min(i, x_.size() - 2);
    }

    // Integral of the cubic from x_[i] to t inside cell i.
    double prefix_in_cell(std::size_t i, double t) const {
        const double h = x_[i + 1] - x_[i];
        const double u = t - x_[i];
        const double v = h - u;
        return m_[i] * (h * h * h * h - v * v * v * v) / (24.0 * h) +
               m_[i + 1] * u * u * u * u / (24.0 * h) +
               (y_[i] / h - m_[i] * h / 6.0) * (h * h - v * v) / 2.0 +
               (y_[i + 1] / h - m_[i + 1] * h / 6.0) * u * u / 2.0;
    }

    void build_natural_three() {
        // one interior curvature, natural ends
        const double h0 = x_[1] - x_[0], h1 = x_[2] - x_[1];
        const double rhs = (y_[2] - y_[1]) / h1 - (y_[1] - y_[0]) / h0;
        m_[1] = 3.0 * rhs / (h0 + h1);
    }

    void build_not_a_knot() {
        const std::size_t n = x_.size();
        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];

        // Unknowns m_1 .. m_{n-2}; the not-a-knot conditions express m_0 and
        // m_{n-1} through their neighbors and fold into the first/last rows.
        const std::size_t k = n - 2;
        std::vector<double> lo(k, 0.0), di(k, 0.0), up(k, 0.0), rhs(k, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const std::size_t r = i - 1;
            lo[r] = h[i - 1] / 6.0;
            di[r] = (h[i - 1] + h[i]) / 3.0;
            up[r] = h[i] / 6.0;
            rhs[r] = (y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1];
        }
        // m_0 = (1 + h0/h1) m_1 - (h0/h1) m_2
        const double r0 = h[0] / h[1];
        di[0] += (h[0] / 6.0) * (1.0 + r0);
        up[0] -= (h[0] / 6.0) * r0;
        // m_{n-1} = (1 + h_{n-2}/h_{n-3}) m_{n-2} - (h_{n-2}/h_{n-3}) m_{n-3}
        const double r1 = h[n - 2] / h[n - 3];
        di[k - 1] += (h[n - 2] / 6.0) * (1.0 + r1);
        lo[k - 1] -= (h[n - 2] / 6.0) * r1;

        solve_tridiagonal(lo, di, up, rhs);
        for (std::size_t i = 1; i + 1 < n; ++i) m_[i] = rhs[i - 1];
        m_[0] = (1.0 + r0) * m_[1] - r0 * m_[2];
        m_[n - 1] = (1.0 + r1) * m_[n - 2] - r1 * m_[n - 3];
    }
};

// Least-squares fit of samples (t_j, v_j) to sum_k c_k t^{p_k}. Exact when
// the counts match. t = 0 rows are allowed when the corresponding power is 0.
inline std::vector<double> power_basis_fit(const std::vector<double>& t,
                                           const std::vector<double>& v,
                                           const std::vector<double>& powers) {
    const std::size_t rows = t.size(), cols = powers.size();
    if (rows != v.size() || rows < cols)
        throw validation_error("power_basis_fit: need at least as many samples as powers");
    auto basis = [&](double tt, double p) {
        if (p == 0.0) return 1.0;
        if (tt == 0.0) return 0.0;
        return std::pow(tt, p);
    };
    // normal equations; the systems here are tiny and well scaled
    std::vector<std::vector<double>> ata(cols, std::vector<double>(cols, 0.0));
    std::vector<double> atv(cols, 0.0);
    for (std::size_t j = 0; j < rows; ++j) {
        for (std::size_t a = 0; a < cols; ++a) {
            const double ba = basis(t[j], powers[a]);
            atv[a] += ba * v[j];
            for (std::size_t b = 0; b < cols; ++b)
                ata[a][b] += ba * basis(t[j], powers[b]);
        }
    }
    return solve_dense_small(std::move(ata), std::move(atv));
}

} // namespace tricomi
