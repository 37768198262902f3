#include "blochsim/special_functions.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace blochsim {

std::vector<double> bessel_j_table(int kmax, double x) {
  if (kmax < 0) throw std::invalid_argument("bessel_j_table: kmax must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
  const double ax = std::abs(x);
  if (ax == 0.0) {
    out[0] = 1.0;
    return out;
  }

  // Start well above both the requested order and the turning point k ~ x.
  const double top = std::max(static_cast<double>(kmax), ax);
  int start = static_cast<int>(top + 30.0 + std::sqrt(60.0 * top));
  if (start % 2) ++start;

  std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
  j[static_cast<std::size_t>(start) + 1] = 0.0;
  j[static_cast<std::size_t>(start)] = 1e-300;
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    const auto uk = static_cast<std::size_t>(k);
    j[uk - 1] = (2.0 * k / ax) * j[uk] - j[uk + 1];
    if (std::abs(j[uk - 1]) > 1e250) {
      for (std::size_t i = uk - 1; i < j.size(); ++i) j[i] *= 1e-250;
      norm *= 1e-250;
    }
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j[uk - 1];
  }
  norm += j[0];

  for (int k = 0; k <= kmax; ++k) {
    double v = j[static_cast<std::size_t>(k)] / norm;
    if (x < 0.0 && (k % 2)) v = -v;
    out[static_cast<std::size_t>(k)] = v;
  }
  return out;
}

double bessel_j(int order, double x) {
  const int n = std::abs(order);
  double v = bessel_j_table(n, x)[static_cast<std::size_t>(n)];
  if (order < 0 && (n % 2)) v = -v;
  return v;
}

}  // namespace blochsim
