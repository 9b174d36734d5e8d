#include "evifuse/numerics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "evifuse/errors.hpp"

namespace evifuse::numerics {

namespace {

// Arguments below this are lifted with the recurrence before the
// asymptotic series is applied.
constexpr double kAsymptoticThreshold = 10.0;

void require_positive(double x, const char* fn) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " +
                          std::to_string(x));
    }
}

}  // namespace

double digamma(double x) {
    require_positive(x, "digamma");

    // psi(x) = psi(x + n) - sum_{i<n} 1/(x + i)
    double shift = 0.0;
    while (x < kAsymptoticThreshold) {
        shift += 1.0 / x;
        x += 1.0;
    }

    // psi(x) ~ ln x - 1/(2x) - sum_k B_2k / (2k x^2k)
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv2 * (1.0 / 12.0 -
        inv2 * (1.0 / 120.0 -
        inv2 * (1.0 / 252.0 -
        inv2 * (1.0 / 240.0 -
        inv2 * (1.0 / 132.0 -
        inv2 * (691.0 / 32760.0 -
        inv2 * (1.0 / 12.0)))))));
    return std::log(x) - 0.5 * inv - series - shift;
}

double trigamma(double x) {
    require_positive(x, "trigamma");

    double shift = 0.0;
    while (x < kAsymptoticThreshold) {
        shift += 1.0 / (x * x);
        x += 1.0;
    }

    // psi'(x) ~ 1/x + 1/(2x^2) + sum_k B_2k / x^(2k+1)
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv2 * (1.0 / 6.0 -
        inv2 * (1.0 / 30.0 -
        inv2 * (1.0 / 42.0 -
        inv2 * (1.0 / 30.0 -
        inv2 * (5.0 / 66.0 -
        inv2 * (691.0 / 2730.0 -
        inv2 * (7.0 / 6.0)))))));
    return inv + 0.5 * inv2 + inv * series + shift;
}

double log_gamma(double x) {
    require_positive(x, "log_gamma");
    return std::lgamma(x);
}

double log_multivariate_beta(std::span<const double> alpha) {
    if (alpha.size() < 2) {
        throw DimensionError("log_multivariate_beta: need at least 2 entries");
    }
    double sum_log = 0.0;
    for (double a : alpha) {
        sum_log += log_gamma(a);
    }
    const double total = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    return sum_log - log_gamma(total);
}

}  // namespace evifuse::numerics
