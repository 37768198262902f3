#pragma once

#include <vector>

namespace blochsim {

/// J_0(x) .. J_kmax(x) by Miller's backward recurrence, normalized with
/// J_0 + 2 sum_k J_2k = 1. Accurate to a few ulps of max|J_k| for |x| up to
/// several hundred.
std::vector<double> bessel_j_table(int kmax, double x);

/// Integer-order Bessel function of the first kind, any sign of order and argument.
double bessel_j(int order, double x);

}  // namespace blochsim
