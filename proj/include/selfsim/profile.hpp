#pragma once

#include <vector>

namespace selfsim {

// Compactly supported bump amp * P(x/r) * cos(pi x/r) (or without the cosine),
// with P(u) = (1 - u^2)^4 on [-1, 1]. Three continuous derivatives.
class Profile {
 public:
  // Unit L2 norm, support radius r, cosine modulated.
  static Profile psi(double radius = 0.5);
  // Unmodulated bump on [-1, 1] scaled so that it lies in the unit Hoelder
  // ball for every exponent up to gamma_max (at most 3).
  static Profile kappa(double gamma_max = 3.0);

  double operator()(double x) const { return derivative(x, 0); }
  double derivative(double x, int k) const;
  double radius() const { return radius_; }
  double amplitude() const { return amp_; }
  bool modulated() const { return cosine_; }
  int smoothness() const { return 3; }
  double sup_derivative(int k) const;
  double l2sq() const;

 private:
  Profile(double radius, bool cosine, double amp) : radius_(radius), cosine_(cosine), amp_(amp) {}
  double radius_;
  bool cosine_;
  double amp_;
};

}  // namespace selfsim
