#include "selfsim/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "selfsim/levels.hpp"

namespace selfsim {

static double bspline3(double u) {
  double a = std::abs(u);
  if (a >= 2.0) return 0.0;
  if (a >= 1.0) {
    double b = 2.0 - a;
    return b * b * b / 6.0;
  }
  return (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0;
}

Kernel Kernel::conv_poly(int power) {
  if (power < 0) throw std::invalid_argument("conv_poly: negative power");
  Kernel k;
  k.kind_ = KernelKind::convolution;
  k.power_ = power;
  // 1 / int_{-1}^{1} (1-u^2)^p du = Gamma(p + 3/2) / (sqrt(pi) Gamma(p + 1))
  k.norm_ = std::exp(std::lgamma(power + 1.5) - std::lgamma(power + 1.0)) / std::sqrt(M_PI);
  k.support_ = 1.0;
  return k;
}

Kernel Kernel::wavelet_proj() {
  Kernel k;
  k.kind_ = KernelKind::wavelet_projection;
  k.power_ = 0;
  k.norm_ = 1.0;
  k.support_ = 4.0;
  return k;
}

Kernel Kernel::by_name(const std::string& name, int power) {
  if (name == "conv_poly") return conv_poly(power);
  if (name == "conv_uniform") return conv_uniform();
  if (name == "wavelet_proj") return wavelet_proj();
  throw std::invalid_argument("unknown kernel: " + name);
}

std::string Kernel::id() const {
  if (kind_ == KernelKind::wavelet_projection) return "wavelet_proj";
  if (power_ == 0) return "conv_uniform";
  return "conv_poly" + std::to_string(power_);
}

double Kernel::profile(double u) const {
  if (kind_ == KernelKind::wavelet_projection) return bspline3(u);
  double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  double b = 1.0 - u * u;
  return norm_ * std::pow(b, power_);
}

double Kernel::profile_radius() const { return kind_ == KernelKind::wavelet_projection ? 2.0 : 1.0; }

double Kernel::profile_l2sq() const {
  if (kind_ != KernelKind::convolution) throw std::logic_error("profile_l2sq: convolution kernels only");
  // c^2 int (1-u^2)^{2p} = c^2 sqrt(pi) Gamma(2p+1) / Gamma(2p + 3/2)
  double p2 = 2.0 * power_;
  return norm_ * norm_ * std::sqrt(M_PI) * std::exp(std::lgamma(p2 + 1.0) - std::lgamma(p2 + 1.5));
}

double Kernel::operator()(double y, double x) const {
  if (kind_ == KernelKind::convolution) return profile(y - x);
  if (std::abs(y - x) >= support_) return 0.0;
  double s = 0.0;
  int k0 = static_cast<int>(std::floor(y - 2.0)) + 1;
  for (int k = k0; k <= k0 + 3; ++k) s += bspline3(y - k) * bspline3(x - k);
  return s;
}

int j_max(const Kernel& K, const Grid& g) {
  return static_cast<int>(std::floor(std::log2(K.support_radius() / (4.0 * g.h()))));
}

GridFunction project(const Kernel& K, int j, const GridFunction& f) {
  auto bank = level_bank(K, f.grid(), {j});
  std::vector<std::vector<double>> out;
  bank->apply(mid_values(f), out);
  return GridFunction(bank->out_grid(), std::move(out[0]));
}

double bias_sup(const Kernel& K, int j, const GridFunction& f) {
  GridFunction p = project(K, j, f);
  GridFunction u = f.unit_slice();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s = std::max(s, std::abs(p[i] - u[i]));
  return s;
}

double delta_true(const Kernel& K, int j, int j2, const GridFunction& f) {
  if (j == j2) return 0.0;
  GridFunction a = project(K, j, f), b = project(K, j2, f);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

TildeCEstimate estimate_tilde_c_scan(const Kernel& K, std::pair<double, double> gamma_range,
                                     const std::vector<Probe>& probes, int j_lo, int j_hi) {
  if (probes.empty()) throw std::invalid_argument("estimate_tilde_c: empty probe set");
  if (j_hi < j_lo) throw std::invalid_argument("estimate_tilde_c: empty level range");
  TildeCEstimate est;
  std::vector<int> levels;
  for (int j = j_lo; j <= j_hi; ++j) levels.push_back(j);
  for (const Probe& p : probes) {
    if (!(p.B > 0.0)) throw std::invalid_argument("estimate_tilde_c: probe needs B > 0");
    double g = std::clamp(p.gamma, gamma_range.first, gamma_range.second);
    auto bank = level_bank(K, p.f.grid(), levels);
    std::vector<std::vector<double>> out;
    bank->apply(mid_values(p.f), out);
    GridFunction u = p.f.unit_slice();
    std::vector<double> row;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      double s = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) s = std::max(s, std::abs(out[l][i] - u[i]));
      double r = s / (p.B * std::pow(2.0, -levels[l] * g));
      row.push_back(r);
      est.max_ratio = std::max(est.max_ratio, r);
    }
    est.ratios.push_back(std::move(row));
  }
  est.value = 1.5 * est.max_ratio;
  return est;
}

double estimate_tilde_c(const Kernel& K, std::pair<double, double> gamma_range,
                        const std::vector<Probe>& probes, int j_lo, int j_hi) {
  return estimate_tilde_c_scan(K, gamma_range, probes, j_lo, j_hi).value;
}

double estimate_tau(const Kernel& K) {
  const double span = K.support_radius() + 0.5;
  const int nq = 40000;
  const double dx = 2.0 * span / nq;
  std::vector<double> ld, lw;
  for (double t : {0.13, 0.5, 0.71}) {
    for (int e = 4; e <= 10; ++e) {
      double d = std::ldexp(1.0, -e);
      double s = 0.0;
      for (int q = 0; q < nq; ++q) {
        double x = t - span + (q + 0.5) * dx;
        double diff = K(t + d, x) - K(t, x);
        s += diff * diff * dx;
      }
      ld.push_back(std::log(d));
      lw.push_back(0.5 * std::log(s));
    }
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < ld.size(); ++i) mx += ld[i], my += lw[i];
  mx /= ld.size();
  my /= ld.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < ld.size(); ++i) {
    sxy += (ld[i] - mx) * (lw[i] - my);
    sxx += (ld[i] - mx) * (ld[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace selfsim
