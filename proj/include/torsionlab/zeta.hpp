#pragma once

// Hurwitz-zeta regularized sums used for the spectral tails on the circle.

namespace torsionlab::zeta {

/// Regularized value of sum_{m >= 0} log(c (m + q)^2), i.e.
/// log(c) zeta_H(0, q) - 2 zeta_H'(0, q), for q > 0.
double hurwitz_log_sum(double c, double q);

/// Regularized sum over all k in Z of log(c (k + a)^2) with a not an integer
/// (mode sum of a twisted circle). Equals log(4 sin^2(pi a)).
double twisted_mode_log_sum(double c, double a);

/// Same sum over k != 0 for a = 0. Equals 2 log(2 pi) - log(c).
double untwisted_mode_log_sum(double c);

}  // namespace torsionlab::zeta
