#include "selfsim/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace selfsim {

namespace {

// Coefficients of (1 - u^2)^4 in increasing powers of u.
constexpr std::array<double, 9> kPoly{1, 0, -4, 0, 6, 0, -4, 0, 1};

double poly_deriv(double u, int k) {
  double s = 0.0;
  for (int p = 8; p >= k; --p) {
    double c = kPoly[static_cast<std::size_t>(p)];
    if (c == 0.0) continue;
    double f = 1.0;
    for (int q = 0; q < k; ++q) f *= (p - q);
    s += c * f * std::pow(u, p - k);
  }
  return s;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double Profile::derivative(double x, int k) const {
  if (k < 0) throw std::invalid_argument("Profile::derivative: negative order");
  double u = x / radius_;
  if (std::abs(u) >= 1.0) return 0.0;
  double s = 0.0;
  if (!cosine_) {
    s = poly_deriv(u, k);
  } else {
    for (int i = 0; i <= k; ++i) {
      int r = k - i;
      double c = std::pow(M_PI, r) * std::cos(M_PI * u + r * M_PI / 2.0);
      s += binom(k, i) * poly_deriv(u, i) * c;
    }
  }
  return amp_ * s * std::pow(radius_, -k);
}

double Profile::sup_derivative(int k) const {
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    double x = radius_ * (-1.0 + 2.0 * i / n);
    s = std::max(s, std::abs(derivative(x, k)));
  }
  return s;
}

double Profile::l2sq() const {
  // Composite Simpson on [-r, r].
  const int n = 20000;
  const double h = 2.0 * radius_ / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    double x = -radius_ + i * h;
    double v = derivative(x, 0);
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * v * v;
  }
  return s * h / 3.0;
}

Profile Profile::psi(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("psi: radius must be positive");
  Profile p(radius, true, 1.0);
  p.amp_ = 1.0 / std::sqrt(p.l2sq());
  return p;
}

Profile Profile::kappa(double gamma_max) {
  if (!(gamma_max > 0.0 && gamma_max <= 3.0)) throw std::invalid_argument("kappa: gamma_max must be in (0, 3]");
  Profile p(1.0, false, 1.0);
  int kmax = static_cast<int>(std::ceil(gamma_max)) - 1;
  double worst = 0.0;
  for (int k = 0; k <= kmax; ++k)
    worst = std::max({worst, 2.0 * p.sup_derivative(k), p.sup_derivative(k + 1)});
  p.amp_ = 1.0 / worst;
  return p;
}

}  // namespace selfsim
