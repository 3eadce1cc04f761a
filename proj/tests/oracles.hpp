#pragma once

// Closed forms used as independent references by the unit and acceptance tests.

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

/// Right-hand side of cos(K L) for a free segment of length a followed by a
/// segment of length b at height v0, wave equation w^2 = beta^2 k^2 + V.
inline double kronig_penney(double omega, double a, double b, double v0, double beta) {
    const double k = omega / beta;
    const double d = (omega * omega - v0) / (beta * beta);
    if (d < 0.0) {
        const double q = std::sqrt(-d);
        return std::cos(k * a) * std::cosh(q * b) +
               (q * q - k * k) / (2.0 * k * q) * std::sin(k * a) * std::sinh(q * b);
    }
    const double k2 = std::sqrt(d);
    return std::cos(k * a) * std::cos(k2 * b) -
           (k * k + k2 * k2) / (2.0 * k * k2) * std::sin(k * a) * std::sin(k2 * b);
}

/// Roots of |rhs| = 1 on (lo, hi), bracketed on a uniform scan and polished
/// with TOMS 748.
inline std::vector<double> kronig_penney_edges(double a, double b, double v0, double beta,
                                               double lo, double hi, int scan) {
    std::vector<double> roots;
    auto f = [&](double w) { return std::abs(kronig_penney(w, a, b, v0, beta)) - 1.0; };
    double x0 = lo, f0 = f(lo);
    for (int i = 1; i <= scan; ++i) {
        const double x1 = lo + (hi - lo) * i / scan;
        const double f1 = f(x1);
        if ((f0 < 0.0) != (f1 < 0.0)) {
            std::uintmax_t iters = 200;
            const auto r = boost::math::tools::toms748_solve(
                f, x0, x1, f0, f1, boost::math::tools::eps_tolerance<double>(50), iters);
            roots.push_back(0.5 * (r.first + r.second));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

/// |t|^2 of a lossless slab of index n, thickness d, in a medium of index n0.
inline double fabry_perot(double n, double n0, double d, double omega) {
    const double s = std::sin(n * omega * d);
    const double c = 0.5 * (n / n0 - n0 / n);
    return 1.0 / (1.0 + c * c * s * s);
}

}  // namespace oracle
