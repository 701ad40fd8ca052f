#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tricomi/numerics.hpp"

namespace tricomi {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

// The full problem datum for the mixed parabolic-hyperbolic equation:
// fractional order alpha, gluing coefficients gamma1/gamma2, boundary data
// phi1/phi2 on the vertical sides, characteristic data psi, gluing kernel
// big_q(x,t), and optionally its rank-one factor q1 with
// d big_q / dt = -q1(x) q1(t).
struct ProblemSpec {
    double alpha = 0.5;
    double gamma1 = 1.0;
    double gamma2 = 0.0;
    Fn1 phi1;        // u(0, y), y in [0,1]
    Fn1 phi2;        // u(1, y), y in [0,1]
    Fn1 psi;         // u on the characteristic x = -y, argument in [0,1/2]
    Fn2 big_q;       // gluing kernel on [0,1]^2
    std::optional<Fn1> q1;
};

struct GridSpec {
    std::size_t nx = 41;        // x-nodes on [0,1]
    std::size_t ny_plus = 41;   // y-nodes on [0,1]
    std::size_t ny_minus = 21;  // y-nodes on [-1/2,0]
};

// Interface traces on y = 0: tau1 = u(x,+0), tau2 = u(x,-0),
// nu1 = lim y^{1-alpha} u_y (y -> +0), nu2 = u_y(x,-0), sampled on the x-grid.
struct TraceSet {
    std::vector<double> tau1;
    std::vector<double> tau2;
    std::vector<double> nu1;
    std::vector<double> nu2;
};

// Sample coordinates produced by make_grid. The triangle rows index into the
// shared x-grid; each negative level keeps the contiguous range of x-nodes
// strictly inside -y < x < y+1.
struct Grid {
    std::vector<double> x;
    std::vector<double> y_plus;   // ascending, starts at 0
    std::vector<double> y_minus;  // ascending from -1/2 to 0
    struct MinusRow {
        std::size_t level;   // index into y_minus, y strictly negative
        std::size_t i_begin; // first admissible x index
        std::size_t i_end;   // one past the last admissible x index
    };
    std::vector<MinusRow> minus_rows;
};

// u sampled over the whole domain: a dense matrix on the closed upper
// rectangle plus ragged strict-interior rows of the lower triangle.
struct SolutionField {
    GridSpec spec;
    Grid grid;
    TraceSet trace;
    std::vector<std::vector<double>> plus_values;   // [ny_plus][nx], row 0 is y=0
    std::vector<std::vector<double>> minus_values;  // aligned with grid.minus_rows
};

struct ResidualEntry {
    std::string name;
    double max_norm = 0.0;
    double l2_norm = 0.0;
    GridSpec grid;
};

struct ResidualReport {
    std::vector<ResidualEntry> entries;
};

// Checks the ProblemSpec invariants and returns the spec unchanged.
// Each violation gets its own diagnostic; validation is idempotent.
inline ProblemSpec validate_problem(const ProblemSpec& spec, double tol = 1e-10) {
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
        throw validation_error("alpha out of range: need 0 < alpha < 1, got " +
                               std::to_string(spec.alpha));
    if (spec.gamma1 == 0.0 && spec.gamma2 == 0.0)
        throw validation_error("gluing coefficients gamma1 and gamma2 are both zero");
    if (!spec.phi1 || !spec.phi2 || !spec.psi || !spec.big_q)
        throw validation_error("problem functions phi1, phi2, psi, Q must all be set");
    const double lhs = spec.phi1(0.0);
    const double rhs = spec.psi(0.0);
    if (!(std::abs(lhs - rhs) <= tol))
        throw validation_error("compatibility phi1(0)=psi(0) violated: phi1(0) = " +
                               std::to_string(lhs) + ", psi(0) = " + std::to_string(rhs));
    return spec;
}

inline Grid make_grid(const GridSpec& g) {
    if (g.nx < 3 || g.ny_plus < 3 || g.ny_minus < 3)
        throw validation_error("grid counts must all be >= 3");
    Grid grid;
    grid.x = linspace(0.0, 1.0, g.nx);
    grid.y_plus = linspace(0.0, 1.0, g.ny_plus);
    grid.y_minus = linspace(-0.5, 0.0, g.ny_minus);
    const double eps = 1e-12;
    for (std::size_t j = 0; j < g.ny_minus; ++j) {
        const double y = grid.y_minus[j];
        if (y >= -eps) continue;
        // strict triangle interior: -y < x < y+1
        std::size_t b = 0;
        while (b < g.nx && grid.x[b] <= -y + eps) ++b;
        std::size_t e = g.nx;
        while (e > b && grid.x[e - 1] >= y + 1.0 - eps) --e;
        if (b < e) grid.minus_rows.push_back({j, b, e});
    }
    return grid;
}

} // namespace tricomi
