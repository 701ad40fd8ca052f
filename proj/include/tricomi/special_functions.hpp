#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tricomi/numerics.hpp"

namespace tricomi {

// 1/Gamma(z), entire: exactly zero at z = 0, -1, -2, ...
// Negative arguments go through the reflection formula in log space so the
// sign and magnitude stay controlled far down the axis.
inline double reciprocal_gamma(double z) {
    if (z > 0.0) {
        if (z > 170.0) return 0.0;      // 1/Gamma underflows double well before this
        return std::exp(-std::lgamma(z));
    }
    // sin(pi z)/pi * Gamma(1-z), with sin(pi z) reduced exactly on the integers
    const double k = std::nearbyint(z);
    const double f = z - k;
    if (f == 0.0) return 0.0;
    const long double s = std::sin(static_cast<long double>(pi) * static_cast<long double>(f)) *
                          ((static_cast<long long>(k) % 2 == 0) ? 1.0L : -1.0L);
    const long double mag = std::log(std::abs(static_cast<double>(s)) / pi) +
                            std::lgamma(1.0 - z);
    if (mag > 11350.0L) throw numeric_error("reciprocal_gamma overflow at z = " + std::to_string(z));
    return static_cast<double>((s > 0 ? 1.0L : -1.0L) * std::exp(mag));
}

struct WrightParams {
    double beta = 0.25;      // series parameter, 0 < beta < 1/2
    int truncation = 400;    // hard budget on summed terms
    double tail_tol = 1e-13; // stop once the geometric tail bound drops below this
};

namespace detail {

// Signed log of 1/Gamma(w) in long double. Returns {log|.|, sign}; sign 0
// flags an exact zero (w a nonpositive integer).
inline std::pair<long double, int> log_reciprocal_gamma(long double w) {
    if (w > 0.0L) return {-std::lgamma(static_cast<double>(w)), 1};
    const long double k = std::nearbyint(w);
    const long double f = w - k;
    if (f == 0.0L) return {0.0L, 0};
    long double s = std::sin(static_cast<long double>(pi) * f);
    if (static_cast<long long>(k) % 2 != 0) s = -s;
    const long double lg = std::log(std::abs(s) / static_cast<long double>(pi)) +
                           static_cast<long double>(std::lgamma(static_cast<double>(1.0L - w)));
    return {lg, s > 0 ? 1 : -1};
}

} // namespace detail

// The entire kernel function e(z) = sum_{n>=0} z^n / (n! Gamma(beta - beta n))
// and its derivative, for 0 < beta < 1/2. Series terms cancel violently for
// large negative z, so sums accumulate in long double and every evaluation
// carries a roundoff floor estimate.
//
// On the negative axis the function obeys the saddle-point envelope
//   |e(-r)| <= C exp(-b(beta) r^{1/(1-beta)}),  b = (1-beta) beta^{beta/(1-beta)},
// with C close to 1 uniformly in beta (checked in high precision over the
// whole parameter range; at beta = 1/2 the formula reproduces the exact
// Gaussian exp(-r^2/4)/sqrt(pi)). Kernel-path evaluations treat arguments
// past envelope exponent 24 as zero, which commits an absolute error below
// 1e-10 while keeping the summed range free of fatal cancellation.
class WrightEvaluator {
public:
    explicit WrightEvaluator(WrightParams p) : p_(p) {
        if (!(p_.beta > 0.0 && p_.beta < 0.5))
            throw validation_error("Wright kernel needs beta in (0, 1/2), got " +
                                   std::to_string(p_.beta));
        if (p_.truncation < 8) throw validation_error("Wright truncation budget too small");
        if (!(p_.tail_tol > 0.0)) throw validation_error("Wright tail tolerance must be positive");
        build_coefficients();
        const double b = (1.0 - p_.beta) * std::pow(p_.beta, p_.beta / (1.0 - p_.beta));
        cutoff_ = std::pow(24.0 / b, 1.0 - p_.beta);
    }

    double beta() const { return p_.beta; }

    // |z| beyond which e(z), e'(z) on the negative axis are below 1e-10 and
    // treated as zero by the kernel paths.
    double cutoff() const { return cutoff_; }

    // Strict evaluations: accurate value or a numeric_error.
    double value(double z) const { return sum_strict(ce_, z, "e"); }
    double derivative(double z) const { return sum_strict(cp_, z, "e'"); }

    // Kernel-path evaluations: deep negative arguments inside the certified
    // cutoff collapse to exactly 0; roundoff up to ~1e-10 absolute is
    // tolerated because the Green's-function kernels have unit scale.
    double kernel_value(double z) const { return sum_kernel(ce_, z, "e"); }
    double kernel_derivative(double z) const { return sum_kernel(cp_, z, "e'"); }

    // Plain partial sum of the first n_terms terms, no stopping logic.
    // Exposes truncation behavior for convergence diagnostics.
    double partial_sum(double z, int n_terms) const {
        long double acc = 0.0L, pw = 1.0L;
        const int n = std::min<int>(n_terms, static_cast<int>(ce_.size()));
        for (int m = 0; m < n; ++m) {
            acc += ce_[static_cast<std::size_t>(m)] * pw;
            pw *= static_cast<long double>(z);
        }
        return static_cast<double>(acc);
    }

private:
    WrightParams p_;
    double cutoff_ = 0.0;
    std::vector<long double> ce_; // coefficients of e
    std::vector<long double> cp_; // coefficients of e'

    void build_coefficients() {
        const std::size_t n = static_cast<std::size_t>(p_.truncation) + 16;
        ce_.resize(n);
        cp_.resize(n);
        const long double b = static_cast<long double>(p_.beta);
        for (std::size_t m = 0; m < n; ++m) {
            const long double lfact = static_cast<long double>(std::lgamma(static_cast<double>(m) + 1.0));
            auto [le, se] = detail::log_reciprocal_gamma(b - b * static_cast<long double>(m));
            ce_[m] = (se == 0) ? 0.0L : static_cast<long double>(se) * std::exp(le - lfact);
            auto [lp, sp] = detail::log_reciprocal_gamma(b - b * static_cast<long double>(m + 1));
            cp_[m] = (sp == 0) ? 0.0L : static_cast<long double>(sp) * std::exp(lp - lfact);
        }
    }

    struct SumResult {
        long double value;
        long double floor;   // roundoff floor from the largest accumulated term
        bool converged;
    };

    SumResult raw_sum(const std::vector<long double>& c, double z) const {
        const long double zz = static_cast<long double>(z);
        long double acc = 0.0L, pw = 1.0L, max_term = 0.0L;
        // past this index the term envelope decays with ratio < 1/2
        const int m_safe = static_cast<int>(std::ceil(
                               std::pow(2.0 * std::abs(z) + 2.0, 1.0 / (1.0 - p_.beta)))) + 2;
        int small_run = 0;
        for (int m = 0; m <= p_.truncation; ++m) {
            const long double t = c[static_cast<std::size_t>(m)] * pw;
            acc += t;
            pw *= zz;
            const long double at = std::abs(t);
            if (at > max_term) max_term = at;
            const long double scale = std::max<long double>(1.0L, std::abs(acc));
            small_run = (at <= 0.5L * p_.tail_tol * scale) ? small_run + 1 : 0;
            if (m >= m_safe && small_run >= 3)
                return {acc, max_term * 1e-18L, true};
        }
        return {acc, max_term * 1e-18L, false};
    }

    double sum_strict(const std::vector<long double>& c, double z, const char* what) const {
        const auto r = raw_sum(c, z);
        if (!r.converged)
            throw numeric_error(std::string("Wright ") + what + " series did not converge within " +
                                std::to_string(p_.truncation) + " terms at z = " + std::to_string(z));
        if (r.floor > std::max<long double>(1e-13L, 0.01L * std::abs(r.value)))
            throw numeric_error(std::string("Wright ") + what +
                                " series lost all significant digits to cancellation at z = " +
                                std::to_string(z) + " (beta = " + std::to_string(p_.beta) + ")");
        return static_cast<double>(r.value);
    }

    double sum_kernel(const std::vector<long double>& c, double z, const char* what) const {
        if (z <= -cutoff_) return 0.0;
        const auto r = raw_sum(c, z);
        if (!r.converged || r.floor > 1e-8L)
            throw numeric_error(std::string("Wright ") + what +
                                " kernel argument z = " + std::to_string(z) +
                                " is outside the reliable evaluation domain for beta = " +
                                std::to_string(p_.beta));
        return static_cast<double>(r.value);
    }
};

inline double wright_e(double z, const WrightParams& p) {
    return WrightEvaluator(p).value(z);
}

inline double wright_e_prime(double z, const WrightParams& p) {
    return WrightEvaluator(p).derivative(z);
}

// Coefficients b_k = (k+1)^{1-alpha} - k^{1-alpha} of the L1 scheme.
inline std::vector<double> l1_coefficients(std::size_t nsteps, double alpha) {
    std::vector<double> b(nsteps);
    const double e = 1.0 - alpha;
    double prev = 0.0;
    for (std::size_t k = 0; k < nsteps; ++k) {
        const double next = std::pow(static_cast<double>(k + 1), e);
        b[k] = next - prev;
        prev = next;
    }
    return b;
}

// L1 approximation of the Caputo derivative of order alpha in (0,1) at the
// j-th node of a uniform grid with step dy, from samples f_0..f_j. Exact for
// affine f.
inline double caputo_l1(const std::vector<double>& f, std::size_t j, double dy, double alpha) {
    if (j == 0 || j >= f.size())
        throw validation_error("caputo_l1: node index out of range");
    const auto b = l1_coefficients(j, alpha);
    double s = 0.0;
    for (std::size_t k = 0; k < j; ++k) s += b[k] * (f[j - k] - f[j - k - 1]);
    return s * std::pow(dy, -alpha) / std::tgamma(2.0 - alpha);
}

} // namespace tricomi
