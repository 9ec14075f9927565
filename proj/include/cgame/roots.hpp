#pragma once

#include "cgame/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

namespace cgame {

/// Absolute x-tolerance used by every bisection in the library.
inline constexpr double kRootTolerance = 1e-12;

/// Number of points in the geometric sign scan that precedes bisection.
inline constexpr std::size_t kScanPoints = 400;

/// n log-spaced points from lo to hi inclusive (lo, hi > 0).
inline std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g;
    if (n == 0) return g;
    g.reserve(n);
    if (n == 1) {
        g.push_back(lo);
        return g;
    }
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        g.push_back(lo * std::exp(step * static_cast<double>(i)));
    }
    g.back() = hi;
    return g;
}

/// First adjacent pair of scan points where f changes sign (or hits zero).
template <class F>
std::optional<std::pair<double, double>> scan_bracket(F&& f, double lo, double hi,
                                                      std::size_t n = kScanPoints) {
    const auto grid = geometric_grid(lo, hi, n);
    double prev_x = grid.front();
    double prev_f = f(prev_x);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double fx = f(grid[i]);
        if (prev_f == 0.0) return std::pair{prev_x, prev_x};
        if ((prev_f < 0.0) != (fx < 0.0) || fx == 0.0) return std::pair{prev_x, grid[i]};
        prev_x = grid[i];
        prev_f = fx;
    }
    return std::nullopt;
}

/// Bisection on a sign-changing bracket. Stops at an absolute width of `tol`
/// or when the bracket cannot be split further in double precision.
template <class F>
double bisect(F&& f, double lo, double hi, double tol = kRootTolerance) {
    if (lo == hi) return lo;
    auto done = [tol](double a, double b) {
        return std::abs(b - a) <= tol || std::nextafter(a, b) == b;
    };
    std::uintmax_t max_iter = 400;
    const auto [a, b] = boost::math::tools::bisect(f, lo, hi, done, max_iter);
    return 0.5 * (a + b);
}

/// Geometric scan followed by bisection; throws NumericalError naming the
/// scanned interval when no sign change is found.
template <class F>
double find_root(F&& f, double lo, double hi, const char* what,
                 std::size_t n = kScanPoints, double tol = kRootTolerance) {
    const auto bracket = scan_bracket(f, lo, hi, n);
    if (!bracket) {
        std::ostringstream msg;
        msg << "no sign change of " << what << " on [" << lo << ", " << hi << "]";
        throw NumericalError(msg.str());
    }
    return bisect(f, bracket->first, bracket->second, tol);
}

}  // namespace cgame
