#include "torsionlab/zeta.hpp"

#include "torsionlab/error.hpp"

#include <cmath>
#include <numbers>

namespace torsionlab::zeta {

double hurwitz_log_sum(double c, double q) {
  if (!(q > 0.0) || !(c > 0.0)) throw Error(ErrorKind::input, "hurwitz_log_sum needs c, q > 0");
  // zeta_H(0, q) = 1/2 - q and zeta_H'(0, q) = lgamma(q) - log(2 pi) / 2.
  return std::log(c) * (0.5 - q) - 2.0 * (std::lgamma(q) - 0.5 * std::log(2.0 * std::numbers::pi));
}

double twisted_mode_log_sum(double c, double a) {
  a -= std::floor(a);
  if (a == 0.0) throw Error(ErrorKind::input, "twisted_mode_log_sum needs a non-integer shift");
  return hurwitz_log_sum(c, a) + hurwitz_log_sum(c, 1.0 - a);
}

double untwisted_mode_log_sum(double c) { return 2.0 * hurwitz_log_sum(c, 1.0); }

}  // namespace torsionlab::zeta
