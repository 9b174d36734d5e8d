#pragma once

#include <span>

namespace evifuse::numerics {

// Digamma psi(x) for x > 0. Throws DomainError for x <= 0 or non-finite x.
double digamma(double x);

// Trigamma psi'(x) for x > 0. Throws DomainError for x <= 0 or non-finite x.
double trigamma(double x);

// ln Gamma(x) for x > 0.
double log_gamma(double x);

// ln B(alpha) = sum ln Gamma(alpha_k) - ln Gamma(sum alpha_k).
// Requires at least two strictly positive entries.
double log_multivariate_beta(std::span<const double> alpha);

}  // namespace evifuse::numerics
