#include "blochsim/expm.hpp"

#include "blochsim/error.hpp"

#include <cmath>
#include <limits>

namespace blochsim {

namespace {
constexpr double kMaxSubstepNorm = 4.0;
}

CVector expm_action(const LinearMap& a, const SpectralBounds& bounds, double tau,
                    const CVector& v, double tol, TaylorStats* stats) {
  const double center = bounds.center();
  const double radius = std::max(bounds.radius(), 0.0);
  // |tau| * radius <= 4 per substep: about 8 products per unit instead of 19
  // at |tau| * radius <= 1, while the largest term stays near 4^4 / 4! ~ 11.
  const int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(tau) * radius / kMaxSubstepNorm)));
  const double h = tau / substeps;

  CVector w = v;
  CVector term(v.size());
  CVector scratch(v.size());
  int products = 0;
  for (int s = 0; s < substeps; ++s) {
    term = w;
    CVector sum = w;
    const double scale = sum.norm();
    for (int k = 1; k < 200; ++k) {
      a(term, scratch);
      ++products;
      scratch -= center * term;
      term = scratch * cplx(0.0, -h / k);
      sum += term;
      if (term.norm() <= tol * scale) break;
      if (k == 199) throw NumericalError("Taylor exponential failed to converge");
    }
    w = std::move(sum);
  }
  if (stats) {
    stats->substeps += substeps;
    stats->products += products;
  }
  return w * std::polar(1.0, -center * tau);
}

SpectralBounds gershgorin_bounds(const CMatrix& h) {
  SpectralBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (Index i = 0; i < h.rows(); ++i) {
    double off = 0.0;
    for (Index j = 0; j < h.cols(); ++j) {
      if (j != i) off += std::abs(h(i, j));
    }
    const double d = h(i, i).real();
    b.lower = std::min(b.lower, d - off);
    b.upper = std::max(b.upper, d + off);
  }
  return b;
}

}  // namespace blochsim
