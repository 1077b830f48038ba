#include "selfsim/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "selfsim/levels.hpp"

namespace selfsim {

static int max_resolved_level(const Profile& psi, const Grid& g) {
  return static_cast<int>(std::floor(std::log2(psi.radius() / (4.0 * g.h()))));
}

SeriesSpec make_series(SeriesRule rule, double gamma, double A, const Kernel& K, const Profile& psi,
                       const Grid& g, double support_gap) {
  SeriesSpec s;
  s.rule = rule;
  s.gamma = gamma;
  s.A = A;
  s.k_star = static_cast<int>(std::floor(4.0 * (psi.radius() + K.support_radius()))) + 1;
  s.ell_lo = 1;
  while (std::ldexp(s.k_star + psi.radius() + K.support_radius(), -s.ell_lo) >= support_gap) ++s.ell_lo;
  s.L = std::min(j_max(K, g) - 2, max_resolved_level(psi, g));
  return s;
}

void validate_series(const SeriesSpec& s, const Kernel& K, const Profile& psi, const Grid& g,
                     double support_gap) {
  if (!(s.k_star > 4.0 * (psi.radius() + K.support_radius())))
    throw std::invalid_argument("series: k_star must exceed 4 (C_psi + C_K)");
  if (!(std::ldexp(s.k_star + psi.radius() + K.support_radius(), -s.ell_lo) < support_gap))
    throw std::invalid_argument("series: ell_lo too small for the support gap");
  if (s.L < s.ell_lo) throw std::invalid_argument("series: need L >= ell_lo");
  if (s.L > max_resolved_level(psi, g)) throw std::invalid_argument("series: L not resolved by the grid");
  if (!(s.gamma > 0.0) || !(s.A > 0.0)) throw std::invalid_argument("series: need gamma > 0 and A > 0");
  if (s.rule == SeriesRule::f_tilde) {
    if (!(s.delta > 0.0 && s.delta < s.gamma)) throw std::invalid_argument("series: need 0 < delta < gamma");
    if (!(s.eps_t > 0.0 && s.eps_t < 1.0)) throw std::invalid_argument("series: need 0 < eps_t < 1");
  }
}

double series_coefficient(const SeriesSpec& s, int ell) {
  double base = std::pow(2.0, -ell * (s.gamma + 0.5));
  if (s.rule == SeriesRule::g_tilde) return base;
  return std::max(base, s.eps_t * std::pow(2.0, -ell * (s.gamma - s.delta + 0.5)));
}

double series_tail_bound(const SeriesSpec& s, const Profile& psi) {
  double g = s.rule == SeriesRule::g_tilde ? s.gamma : s.gamma - s.delta;
  double c = s.rule == SeriesRule::g_tilde ? 1.0 : std::max(1.0, s.eps_t);
  return s.A * c * psi.sup_derivative(0) * std::pow(2.0, -(s.L + 1) * g) / (1.0 - std::pow(2.0, -g));
}

GridFunction psi_scaled(const Profile& psi, int ell, int k, const Grid& g) {
  if (std::ldexp(psi.radius(), -ell) < 4.0 * g.h()) throw std::invalid_argument("psi_scaled: scale not resolved");
  const double s = std::ldexp(1.0, ell), amp = std::sqrt(s);
  return GridFunction::sample(g, [&](double x) { return amp * psi(s * x - k); });
}

GridFunction series_function(const SeriesSpec& s, const Profile& psi, const Grid& g) {
  GridFunction f(g);
  for (int ell = s.ell_lo; ell <= s.L; ++ell) {
    double c = s.A * series_coefficient(s, ell);
    const double sc = std::ldexp(1.0, ell), amp = std::sqrt(sc) * c;
    double lo = (s.k_star - psi.radius()) / sc, hi = (s.k_star + psi.radius()) / sc;
    for (std::size_t i = 0; i < f.size(); ++i) {
      double x = g.node(i);
      if (x <= lo || x >= hi) continue;
      f[i] += amp * psi(sc * x - s.k_star);
    }
  }
  return f;
}

GridFunction g_tilde(const SeriesSpec& s, const Profile& psi, const Grid& g) {
  SeriesSpec t = s;
  t.rule = SeriesRule::g_tilde;
  return series_function(t, psi, g);
}

GridFunction f_tilde(const SeriesSpec& s, const Profile& psi, const Grid& g) {
  SeriesSpec t = s;
  t.rule = SeriesRule::f_tilde;
  if (!(t.delta > 0.0 && t.delta < t.gamma)) throw std::invalid_argument("f_tilde: need 0 < delta < gamma");
  if (!(t.eps_t > 0.0 && t.eps_t < 1.0)) throw std::invalid_argument("f_tilde: need 0 < eps_t < 1");
  return series_function(t, psi, g);
}

L2Gap l2_gap(double gamma, double delta, double eps_t, double A, const SeriesSpec& base, const Profile& psi,
             const Grid& g) {
  SeriesSpec gs = base, fs = base;
  gs.rule = SeriesRule::g_tilde;
  gs.gamma = gamma;
  gs.A = A;
  fs.rule = SeriesRule::f_tilde;
  fs.gamma = gamma;
  fs.A = A;
  fs.delta = delta;
  fs.eps_t = eps_t;
  L2Gap r;
  r.gap = l2_norm(f_tilde(fs, psi, g) - g_tilde(gs, psi, g));
  r.bound = A * std::sqrt(2.0) * std::pow(eps_t, (2.0 * gamma + 1.0) / (2.0 * delta));
  return r;
}

double delta_n_sequence(double n, double gamma, double eps_t) {
  if (!(n > M_E)) throw std::invalid_argument("delta_n_sequence: need n > e");
  if (!(eps_t > 0.0 && eps_t < 1.0)) throw std::invalid_argument("delta_n_sequence: need 0 < eps_t < 1");
  double ln = std::log(n);
  double b = 1.0 / std::sqrt(ln);
  double C = (1.0 - b) * (2.0 * gamma + 1.0) * std::log(1.0 / eps_t);
  return C / ln;
}

double lower_constant(const Kernel& K, const Profile& psi) {
  const double r = psi.radius(), span = r + K.support_radius();
  const int ny = 4000, nx = 4001;
  const double dy = 2.0 * r / ny;
  std::vector<double> ys(ny), ps(ny);
  for (int q = 0; q < ny; ++q) {
    ys[q] = -r + (q + 0.5) * dy;
    ps[q] = psi(ys[q]);
  }
  double best = 0.0;
  for (int i = 0; i < nx; ++i) {
    double x = -span + 2.0 * span * i / (nx - 1);
    double s = 0.0;
    for (int q = 0; q < ny; ++q) s += K(x, ys[q]) * ps[q];
    best = std::max(best, std::abs(s * dy - psi(x)));
  }
  return best;
}

double upper_constant(const Profile& psi, double gamma) {
  int k = floor_strict(gamma);
  if (k + 1 > psi.smoothness()) throw std::invalid_argument("upper_constant: profile not smooth enough");
  double alpha = gamma - k;
  return 2.0 * psi.sup_derivative(k + 1) * std::pow(2.0 * psi.radius(), 1.0 - alpha);
}

Interval psi_support(const Profile& psi, int ell, int k) {
  double s = std::ldexp(1.0, -ell);
  return {s * (k - psi.radius()), s * (k + psi.radius())};
}

Interval projected_support(const Kernel& K, const Profile& psi, int j, int ell, int k) {
  Interval p = psi_support(psi, ell, k);
  double w = std::ldexp(K.support_radius(), -j);
  return {p.lo - w, p.hi + w};
}

bool supports_disjoint(const Kernel& K, const Profile& psi, int k_star, int ell_lo, int L) {
  for (int j = ell_lo; j <= L; ++j) {
    Interval win = projected_support(K, psi, j, j, k_star);
    for (int l = ell_lo; l <= L; ++l) {
      if (l == j) continue;
      if (win.overlaps(psi_support(psi, l, k_star))) return false;
      if (win.overlaps(projected_support(K, psi, j, l, k_star))) return false;
    }
  }
  return true;
}

BumpFamily bump_alternatives(double gamma, double B, double a, double b, double eta, const Profile& kappa,
                             double n, double sigma, const Grid& g) {
  if (!(a < b)) throw std::invalid_argument("bump_alternatives: need a < b");
  if (!(kappa(0.0) > 0.0)) throw std::invalid_argument("bump_alternatives: need kappa(0) > 0");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("bump_alternatives: need 0 < eta < 1");
  double sn = sigma / std::sqrt(n);
  if (!(sn > 0.0 && sn < 1.0)) throw std::invalid_argument("bump_alternatives: need 0 < sigma_n < 1");
  BumpFamily fam;
  const double k0 = kappa(0.0), kk = kappa.l2sq(), Ak = kappa.radius();
  const double e = gamma / (2.0 * gamma + 1.0);
  fam.C = std::pow(4.0 / (2.0 * gamma + 1.0) * std::pow(B, 1.0 / gamma) / kk, e) * k0;
  double rate = sn * sn * std::log(1.0 / sn);
  fam.h = std::pow((1.0 - eta) * fam.C / (B * k0), 1.0 / gamma) * std::pow(rate, 1.0 / (2.0 * gamma + 1.0));
  fam.M = static_cast<int>(std::floor((b - a) / (2.0 * Ak * fam.h))) - 1;
  if (fam.M < 1) throw std::invalid_argument("bump_alternatives: interval too short for the bump scale");
  fam.height = B * std::pow(fam.h, gamma) * k0;
  fam.s2 = B * B * std::pow(fam.h, 2.0 * gamma + 1.0) * kk;
  const double amp = B * std::pow(fam.h, gamma);
  for (int k = 1; k <= fam.M; ++k) {
    double c = a + (2.0 * k - 1.0) * Ak * fam.h;
    fam.centers.push_back(c);
    fam.bumps.push_back(GridFunction::sample(g, [&](double x) { return amp * kappa((x - c) / fam.h); }));
  }
  return fam;
}

bool MembershipReport::lower_all() const {
  return !lower_ok.empty() && std::all_of(lower_ok.begin(), lower_ok.end(), [](bool b) { return b; });
}

bool MembershipReport::upper_all() const {
  return !upper_ok.empty() && std::all_of(upper_ok.begin(), upper_ok.end(), [](bool b) { return b; });
}

std::vector<double> bias_profile(const Kernel& K, const GridFunction& f, double gamma, int lo, int hi) {
  std::vector<int> levels;
  for (int j = lo; j <= hi; ++j) levels.push_back(j);
  auto bank = level_bank(K, f.grid(), levels);
  std::vector<std::vector<double>> out;
  bank->apply(mid_values(f), out);
  auto r = f.grid().unit_range();
  std::vector<double> prof;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    double s = 0.0;
    for (std::size_t i = 0; i < out[l].size(); ++i) s = std::max(s, std::abs(out[l][i] - f[r.first + i]));
    prof.push_back(s * std::pow(2.0, levels[l] * gamma));
  }
  return prof;
}

MembershipReport check_membership(const GridFunction& f, const SelfSimClassSpec& spec, int j_hi) {
  const int jm = j_max(spec.kernel, f.grid());
  if (!(spec.ell_lo <= j_hi && j_hi <= jm)) throw std::invalid_argument("check_membership: need ell_lo <= j_hi <= j_max");
  if (!(spec.B > 0.0)) throw std::invalid_argument("check_membership: need B > 0");
  MembershipReport rep;
  const double eps = spec.effective_epsilon();
  auto prof = bias_profile(spec.kernel, f, spec.gamma, spec.ell_lo, j_hi);
  for (int j = spec.ell_lo; j <= j_hi; ++j) {
    double p = prof[static_cast<std::size_t>(j - spec.ell_lo)];
    double r = p / spec.B;
    rep.levels.push_back(j);
    rep.bias.push_back(p * std::pow(2.0, -j * spec.gamma));
    rep.ratios.push_back(r);
    rep.lower_ok.push_back(r >= eps * (1.0 - spec.tol));
    rep.upper_ok.push_back(r <= spec.tilde_c * (1.0 + spec.tol));
  }
  rep.holder = holder_seminorm(f, spec.gamma);
  rep.holder_ok = rep.holder <= spec.B * (1.0 + spec.tol);
  return rep;
}

void write_membership_csv(const std::string& path, const MembershipReport& r, const SelfSimClassSpec& spec) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << std::setprecision(10);
  os << "j,bias,ratio,lower_ok,upper_ok\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i)
    os << r.levels[i] << ',' << r.bias[i] << ',' << r.ratios[i] << ',' << int(r.lower_ok[i]) << ','
       << int(r.upper_ok[i]) << '\n';
  os << "# gamma=" << spec.gamma << " B=" << spec.B << " epsilon=" << spec.effective_epsilon()
     << " holder=" << r.holder << " holder_ok=" << int(r.holder_ok) << " member=" << int(r.member()) << '\n';
}

}  // namespace selfsim
