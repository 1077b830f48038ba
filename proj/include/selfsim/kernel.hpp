#pragma once

#include <string>
#include <utility>
#include <vector>

#include "selfsim/grid.hpp"

namespace selfsim {

enum class KernelKind { convolution, wavelet_projection };

// Bivariate kernel K(y, x). Convolution kernels are K(y,x) = k(y - x) for a
// profile k supported on [-1, 1]; the wavelet projection kernel is
// sum_k phi(y - k) phi(x - k) with phi the centered cubic B-spline.
class Kernel {
 public:
  // Profile c_p (1 - u^2)^p on [-1, 1]; p = 0 is the uniform profile.
  static Kernel conv_poly(int power = 3);
  static Kernel conv_uniform() { return conv_poly(0); }
  static Kernel wavelet_proj();
  // "conv_poly", "conv_uniform" or "wavelet_proj".
  static Kernel by_name(const std::string& name, int power = 3);

  KernelKind kind() const { return kind_; }
  double support_radius() const { return support_; }
  int power() const { return power_; }
  std::string id() const;

  double operator()(double y, double x) const;
  // Convolution profile k(u), or the father profile phi(u).
  double profile(double u) const;
  // Half-width of the profile support (1 for convolution, 2 for phi).
  double profile_radius() const;
  // Integral of k^2 (convolution kinds only).
  double profile_l2sq() const;

 private:
  KernelKind kind_ = KernelKind::convolution;
  int power_ = 3;
  double norm_ = 35.0 / 32.0;
  double support_ = 1.0;
};

// Largest level whose kernel window spans at least four cells.
int j_max(const Kernel& K, const Grid& g);

// K_j f on the nodes of f's grid inside [0, 1].
GridFunction project(const Kernel& K, int j, const GridFunction& f);
double bias_sup(const Kernel& K, int j, const GridFunction& f);
double delta_true(const Kernel& K, int j, int j2, const GridFunction& f);

struct Probe {
  GridFunction f;
  double gamma;
  double B;
};

struct TildeCEstimate {
  double value = 0.0;                // max ratio times the safety factor
  double max_ratio = 0.0;
  std::vector<std::vector<double>> ratios;  // per probe, per level
};

TildeCEstimate estimate_tilde_c_scan(const Kernel& K, std::pair<double, double> gamma_range,
                                     const std::vector<Probe>& probes, int j_lo, int j_hi);
double estimate_tilde_c(const Kernel& K, std::pair<double, double> gamma_range,
                        const std::vector<Probe>& probes, int j_lo, int j_hi);

// Least-squares exponent tau of s -> ||K(s, .) - K(t, .)||_2 ~ |s - t|^tau.
double estimate_tau(const Kernel& K);

}  // namespace selfsim
