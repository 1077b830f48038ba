#pragma once

#include <string>
#include <vector>

#include "selfsim/grid.hpp"
#include "selfsim/kernel.hpp"
#include "selfsim/profile.hpp"

namespace selfsim {

enum class SeriesRule { g_tilde, f_tilde };

// Sparse series A * sum_{l = ell_lo}^{L} beta_l psi_{l, k_star}.
struct SeriesSpec {
  int k_star = 7;
  int ell_lo = 4;
  int L = 11;
  SeriesRule rule = SeriesRule::g_tilde;
  double gamma = 1.0;
  double A = 1.0;
  double delta = 0.0;  // f_tilde only
  double eps_t = 0.0;  // f_tilde only
};

// Smallest admissible k_star and ell_lo for the kernel, and L = j_max - 2.
SeriesSpec make_series(SeriesRule rule, double gamma, double A, const Kernel& K, const Profile& psi,
                       const Grid& g, double support_gap = 1.0);
void validate_series(const SeriesSpec& s, const Kernel& K, const Profile& psi, const Grid& g,
                     double support_gap = 1.0);
double series_coefficient(const SeriesSpec& s, int ell);
// Sup-norm bound of the truncated tail sum_{l > L}.
double series_tail_bound(const SeriesSpec& s, const Profile& psi);

GridFunction psi_scaled(const Profile& psi, int ell, int k, const Grid& g);
GridFunction series_function(const SeriesSpec& s, const Profile& psi, const Grid& g);
GridFunction g_tilde(const SeriesSpec& s, const Profile& psi, const Grid& g);
GridFunction f_tilde(const SeriesSpec& s, const Profile& psi, const Grid& g);

struct L2Gap {
  double gap = 0.0;
  double bound = 0.0;
};
L2Gap l2_gap(double gamma, double delta, double eps_t, double A, const SeriesSpec& base, const Profile& psi,
             const Grid& g);

double delta_n_sequence(double n, double gamma, double eps_t);

// sup_x |K_0 psi(x) - psi(x)|.
double lower_constant(const Kernel& K, const Profile& psi);
// 2 ||psi^{(k+1)}|| (2 C_psi)^{1 - (gamma - k)} with k the strict floor of gamma.
double upper_constant(const Profile& psi, double gamma);

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool overlaps(const Interval& o) const { return lo < o.hi && o.lo < hi; }
};
Interval psi_support(const Profile& psi, int ell, int k);
// Support of K_j psi_{ell k}.
Interval projected_support(const Kernel& K, const Profile& psi, int j, int ell, int k);
// The windows of K_j psi_{j k} are disjoint from the supports of psi_{l k}
// and K_j psi_{l k} for every l != j in [ell_lo, L].
bool supports_disjoint(const Kernel& K, const Profile& psi, int k_star, int ell_lo, int L);

struct BumpFamily {
  std::vector<GridFunction> bumps;
  std::vector<double> centers;
  double h = 0.0;
  int M = 0;
  double C = 0.0;       // C(gamma, B, kappa)
  double height = 0.0;  // B h^gamma kappa(0)
  double s2 = 0.0;      // B^2 h^{2 gamma + 1} ||kappa||^2
};

BumpFamily bump_alternatives(double gamma, double B, double a, double b, double eta, const Profile& kappa,
                             double n, double sigma, const Grid& g);

enum class ClassVariant { standard, alternative };

struct SelfSimClassSpec {
  double gamma = 1.0;
  double B = 1.0;
  double epsilon = 0.1;
  int ell_lo = 4;
  Kernel kernel = Kernel::conv_poly();
  ClassVariant variant = ClassVariant::standard;
  double b1 = 0.0;      // alternative variant: lower constant, epsilon = b1 / B
  double tilde_c = 1.0;
  double tol = 0.05;

  double effective_epsilon() const { return variant == ClassVariant::alternative ? b1 / B : epsilon; }
};

struct MembershipReport {
  std::vector<int> levels;
  std::vector<double> bias;
  std::vector<double> ratios;  // bias / (B 2^{-j gamma})
  std::vector<bool> lower_ok;
  std::vector<bool> upper_ok;
  double holder = 0.0;
  bool holder_ok = false;

  bool lower_all() const;
  bool upper_all() const;
  bool self_similar() const { return lower_all() && upper_all(); }
  bool member() const { return self_similar() && holder_ok; }
};

MembershipReport check_membership(const GridFunction& f, const SelfSimClassSpec& spec, int j_hi);
void write_membership_csv(const std::string& path, const MembershipReport& r, const SelfSimClassSpec& spec);

// bias_sup(K, j, f) 2^{j gamma} for j in [lo, hi].
std::vector<double> bias_profile(const Kernel& K, const GridFunction& f, double gamma, int lo, int hi);

}  // namespace selfsim
