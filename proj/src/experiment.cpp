#include "selfsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "selfsim/levels.hpp"
#include "selfsim/observation.hpp"
#include "selfsim/parallel.hpp"
#include "selfsim/rng.hpp"

namespace selfsim {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return empirical_quantile(std::move(v), 0.5);
}

double mcse(double p, int reps) { return std::sqrt(p * (1.0 - p) / reps); }

const std::uint64_t kCalibStream = 0xCA1B0000ull;

}  // namespace

double FunctionSpec::class_gamma() const { return family == "f_tilde" ? gamma - delta : gamma; }

std::string FunctionSpec::id() const {
  std::string s = family;
  if (family == "zero") return s;
  if (family == "file") return "file:" + std::filesystem::path(path).filename().string();
  s += "_g" + short_num(gamma);
  if (family != "bumps") s += "_A" + short_num(A);
  if (family == "f_tilde") s += "_d" + short_num(delta) + "_e" + short_num(eps_t);
  if (family == "bumps" || family == "composite") s += "_B" + short_num(bump_B);
  return s;
}

GridFunction build_function(const FunctionSpec& s, const Kernel& K, const Grid& g) {
  Profile psi = Profile::psi();
  if (s.family == "g_tilde") {
    auto spec = make_series(SeriesRule::g_tilde, s.gamma, s.A, K, psi, g, s.support_gap);
    validate_series(spec, K, psi, g, s.support_gap);
    return g_tilde(spec, psi, g);
  }
  if (s.family == "f_tilde") {
    auto spec = make_series(SeriesRule::f_tilde, s.gamma, s.A, K, psi, g, s.support_gap);
    spec.delta = s.delta;
    spec.eps_t = s.eps_t;
    validate_series(spec, K, psi, g, s.support_gap);
    return f_tilde(spec, psi, g);
  }
  if (s.family == "bumps" || s.family == "composite") {
    double a = s.family == "bumps" ? 0.0 : 0.5;
    auto fam = bump_alternatives(s.gamma, s.bump_B, a, 1.0, 0.1, Profile::kappa(), s.bump_n, 1.0, g);
    GridFunction f(g);
    for (const auto& b : fam.bumps) f += b;
    if (s.family == "bumps") return f;
    auto spec = make_series(SeriesRule::g_tilde, s.gamma, s.A, K, psi, g, 0.5);
    validate_series(spec, K, psi, g, 0.5);
    return g_tilde(spec, psi, g) + f;
  }
  if (s.family == "zero") return GridFunction(g);
  if (s.family == "file") {
    GridFunction src = read_csv(s.path);
    if (src.grid() == g) return src;
    return GridFunction::sample(g, [&](double x) { return src(x); });
  }
  throw std::invalid_argument("unknown function family: " + s.family);
}

LevelRange ExperimentConfig::levels_for(double n) const {
  Kernel K = make_kernel();
  LevelRange J = default_levels(n, K, grid);
  if (j_lo > 0) J.lo = j_lo;
  if (j_hi > 0) J.hi = j_hi;
  if (J.lo < 1 || J.hi < J.lo) throw std::invalid_argument("levels: need 1 <= j_lo <= j_hi");
  if (J.hi > j_max(K, grid)) throw std::invalid_argument("levels: j_hi exceeds j_max of the grid");
  return J;
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> studies{"coverage", "rate-scan", "eps-scan", "gamma-ci", "calibrate"};
  if (std::find(studies.begin(), studies.end(), study) == studies.end())
    throw std::invalid_argument("unknown study: " + study);
  RegularityRanges r = ranges;
  r.epsilon = 0.5;
  r.validate();
  if (reps < 50) throw std::invalid_argument("config: need reps >= 50");
  if (!(alpha > 0.0 && 2.0 * alpha < beta && beta < 1.0)) throw std::invalid_argument("config: need 0 < 2 alpha < beta < 1");
  if (n_list.empty()) throw std::invalid_argument("config: empty n list");
  for (double n : n_list)
    if (!(n > 2.0)) throw std::invalid_argument("config: need n > 2");
  if (eps_list.empty()) throw std::invalid_argument("config: empty epsilon list");
  for (double e : eps_list)
    if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("config: need 0 < epsilon <= 1");
  if (sigma < 0.0) throw std::invalid_argument("config: need sigma >= 0");
  if (functions.empty()) throw std::invalid_argument("config: no test function");
  if (tilde_c != 0.0 && tilde_c < 1.0) throw std::invalid_argument("config: tilde_c must be >= 1");
  if (workers < 1) throw std::invalid_argument("config: need workers >= 1");
  if (study == "rate-scan") {
    if (n_list.size() < 4) throw std::invalid_argument("rate-scan: need at least 4 values of n");
    auto [mn, mx] = std::minmax_element(n_list.begin(), n_list.end());
    if (*mx / *mn < 100.0 * (1.0 - 1e-9)) throw std::invalid_argument("rate-scan: n must span two decades");
  }
  if (study == "eps-scan") {
    if (eps_list.size() < 4) throw std::invalid_argument("eps-scan: need at least 4 epsilon values");
    double q = eps_list[1] / eps_list[0];
    for (std::size_t i = 1; i < eps_list.size(); ++i)
      if (std::abs(eps_list[i] / eps_list[i - 1] - q) > 1e-9 * q || q == 1.0)
        throw std::invalid_argument("eps-scan: epsilon values must be geometric");
  }
}

std::string ExperimentConfig::echo() const {
  std::ostringstream os;
  auto list = [&](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
  };
  os << "study = " << study << "\n";
  os << "kernel = " << kernel << "\nkernel_power = " << kernel_power << "\n";
  os << "gamma_lo = " << fmt(ranges.gamma_lo) << "\ngamma_hi = " << fmt(ranges.gamma_hi) << "\n";
  os << "B_lo = " << fmt(ranges.B_lo) << "\nB_hi = " << fmt(ranges.B_hi) << "\n";
  os << "epsilon = " << list(eps_list) << "\n";
  for (std::size_t i = 0; i < functions.size(); ++i) os << "function." << i << " = " << functions[i].id() << "\n";
  os << "n = " << list(n_list) << "\nsigma = " << fmt(sigma) << "\n";
  os << "alpha = " << fmt(alpha) << "\nbeta = " << fmt(beta) << "\nreps = " << reps << "\nseed = " << seed << "\n";
  os << "grid_lo = " << fmt(grid.lo) << "\ngrid_hi = " << fmt(grid.hi) << "\ngrid_m = " << grid.m << "\n";
  os << "calib_reps = " << calib_reps << "\ntarget = " << fmt(calibration_target()) << "\n";
  os << "cbar = " << fmt(cbar) << "\ntilde_c = " << fmt(tilde_c) << "\n";
  os << "j_lo = " << j_lo << "\nj_hi = " << j_hi << "\n";
  return os.str();
}

ExperimentConfig experiment_config(const Config& c) {
  ExperimentConfig e;
  e.study = c.str("study", e.study);
  e.kernel = c.str("kernel", e.kernel);
  e.kernel_power = static_cast<int>(c.integer("kernel_power", e.kernel_power));
  e.ranges.gamma_lo = c.num("gamma_lo", e.ranges.gamma_lo);
  e.ranges.gamma_hi = c.num("gamma_hi", e.ranges.gamma_hi);
  e.ranges.B_lo = c.num("B_lo", e.ranges.B_lo);
  e.ranges.B_hi = c.num("B_hi", e.ranges.B_hi);
  e.eps_list = c.nums("epsilon", e.eps_list);
  if (!e.eps_list.empty()) e.ranges.epsilon = e.eps_list.front();

  FunctionSpec base;
  base.delta = c.num("delta", base.delta);
  base.eps_t = c.num("eps_t", base.eps_t);
  base.bump_B = c.num("bump_B", base.bump_B);
  base.bump_n = c.num("bump_n", base.bump_n);
  base.support_gap = c.num("support_gap", base.support_gap);
  base.path = c.str("function_file", "");
  auto fams = c.strs("family", {base.family});
  auto gammas = c.nums("gamma", {base.gamma});
  auto As = c.nums("A", {base.A});
  e.functions.clear();
  for (const auto& fam : fams)
    for (double g : gammas)
      for (double A : As) {
        FunctionSpec s = base;
        s.family = fam;
        s.gamma = g;
        s.A = A;
        e.functions.push_back(s);
      }

  e.n_list = c.nums("n", e.n_list);
  e.sigma = c.num("sigma", e.sigma);
  e.alpha = c.num("alpha", e.alpha);
  e.beta = c.num("beta", e.beta);
  e.reps = static_cast<int>(c.integer("reps", e.reps));
  e.seed = c.u64("seed", e.seed);
  double lo = c.num("grid_lo", e.grid.lo), hi = c.num("grid_hi", e.grid.hi);
  auto m = c.integer("grid_m", static_cast<long long>(e.grid.m));
  if (m < 2) throw std::invalid_argument("config: grid_m must be >= 2");
  e.grid = Grid(lo, hi, static_cast<std::size_t>(m));
  e.out = c.str("out", e.out);
  e.calib_reps = static_cast<int>(c.integer("calib_reps", e.calib_reps));
  e.target = c.num("target", e.target);
  e.cbar = c.num("cbar", e.cbar);
  e.tilde_c = c.num("tilde_c", e.tilde_c);
  e.j_lo = static_cast<int>(c.integer("j_lo", e.j_lo));
  e.j_hi = static_cast<int>(c.integer("j_hi", e.j_hi));
  e.workers = static_cast<int>(c.integer("workers", e.workers));
  auto extra = c.unused();
  if (!extra.empty()) throw std::invalid_argument("config: unknown key " + extra.front());
  return e;
}

double CalibrationCache::get(const Kernel& K, const LevelRange& J, double target, int reps, const Grid& g,
                             std::uint64_t seed, int workers) {
  std::string key = K.id() + ":" + std::to_string(J.lo) + ":" + std::to_string(J.hi) + ":" + fmt(target) + ":" +
                    std::to_string(reps) + ":" + std::to_string(g.m) + ":" + fmt(g.lo) + ":" + fmt(g.hi);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
  }
  std::uint64_t s = derive_seed(seed, kCalibStream, static_cast<std::uint64_t>(J.lo * 64 + J.hi));
  double v = calibrate_cbar(K, J, target, reps, g, s, workers);
  std::lock_guard<std::mutex> lk(mu_);
  values_[key] = v;
  return v;
}

double resolve_tilde_c(const ExperimentConfig& cfg, const Kernel& K) {
  if (cfg.tilde_c > 0.0) return cfg.tilde_c;
  Profile psi = Profile::psi();
  const auto& r = cfg.ranges;
  std::vector<Probe> probes;
  int lo = 0;
  for (double g : {r.gamma_lo, 0.5 * (r.gamma_lo + r.gamma_hi), r.gamma_hi}) {
    g = std::min(g, 3.0);
    auto s = make_series(SeriesRule::g_tilde, g, 1.0, K, psi, cfg.grid);
    GridFunction f = g_tilde(s, psi, cfg.grid);
    probes.push_back({f, g, holder_seminorm(f, g)});
    lo = std::max(lo, s.ell_lo);
  }
  double v = estimate_tilde_c(K, {r.gamma_lo, r.gamma_hi}, probes, lo, j_max(K, cfg.grid));
  return std::max(1.0, v);
}

Certificate certify(const GridFunction& f, double gamma, const Kernel& K, const LevelRange& J,
                    const RegularityRanges& r, double tilde_c, double tol) {
  Certificate c;
  auto prof = bias_profile(K, f, gamma, J.lo, J.hi);
  c.ratio_min = *std::min_element(prof.begin(), prof.end());
  c.ratio_max = *std::max_element(prof.begin(), prof.end());
  c.holder = holder_seminorm(f, gamma);
  c.holder_ok = c.holder <= r.B_hi * (1.0 + tol);
  // smallest admissible B is max(B_lo, ratio_max / C~); the lower side then needs eps B <= ratio_min
  double B = std::max(r.B_lo, c.ratio_max / tilde_c);
  bool in_range = gamma >= r.gamma_lo && gamma <= r.gamma_hi && B <= r.B_hi * (1.0 + tol);
  c.certified = in_range && c.ratio_min > 0.0 && r.epsilon * B <= c.ratio_min * (1.0 + tol);
  return c;
}

SlopeFit ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("ols_slope: need at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("ols_slope: degenerate x");
  SlopeFit f;
  f.slope = sxy / sxx;
  double icpt = my - f.slope * mx, rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - icpt - f.slope * x[i];
    rss += e * e;
  }
  f.se = std::sqrt(rss / (n - 2.0) / sxx);
  f.points = static_cast<int>(x.size());
  return f;
}

namespace {

struct RepOutcome {
  bool e4 = false, e5 = false;
  std::vector<char> covered, feasible, crossed, gamma_in;
  std::vector<double> width, glo, ghi;
  std::vector<int> j;
};

// All (function, n, epsilon) cells; replications share the noise draw across epsilon.
std::vector<CellResult> run_cells(const ExperimentConfig& cfg) {
  cfg.validate();
  const Kernel K = cfg.make_kernel();
  const double tc = resolve_tilde_c(cfg, K);
  CalibrationCache cache;
  std::vector<CellResult> cells;
  const std::size_t ne = cfg.eps_list.size();

  for (std::size_t fi = 0; fi < cfg.functions.size(); ++fi) {
    const FunctionSpec& fs = cfg.functions[fi];
    const GridFunction f = build_function(fs, K, cfg.grid);
    const GridFunction fu = f.unit_slice();
    const double cg = fs.class_gamma();
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      const double n = cfg.n_list[ni];
      const LevelRange J = cfg.levels_for(n);
      const auto levels = J.levels();
      const double cbar =
          cfg.cbar > 0.0 ? cfg.cbar
                         : cache.get(K, J, cfg.calibration_target(), cfg.calib_reps, cfg.grid, cfg.seed, cfg.workers);
      const double sn = cfg.sigma / std::sqrt(n);
      CriticalValueRule rule{cbar, sn, J};

      std::vector<std::vector<double>> proj;
      for (int j : levels) proj.push_back(project(K, j, f).values());

      std::vector<BandConfig> bcs(ne);
      std::vector<Certificate> certs(ne);
      for (std::size_t e = 0; e < ne; ++e) {
        bcs[e].epsilon = cfg.eps_list[e];
        bcs[e].tilde_c = tc;
        bcs[e].ranges = cfg.ranges;
        bcs[e].ranges.epsilon = cfg.eps_list[e];
        bcs[e].rule = rule;
        certs[e] = certify(f, cg, K, J, bcs[e].ranges, tc);
      }

      const std::uint64_t stream = 1 + fi * 4096 + ni;
      std::vector<RepOutcome> out(static_cast<std::size_t>(cfg.reps));
      level_bank(K, cfg.grid, levels);
      parallel_for(out.size(), cfg.workers, [&](std::size_t rep) {
        RepOutcome& o = out[rep];
        Observation obs = synthesize(f, cfg.sigma, n, cfg.grid, derive_seed(cfg.seed, stream, rep));
        auto est = kernel_estimates(obs, K, levels);
        auto dh = pairwise_sup(est);
        o.e4 = event4(est, proj, rule);
        o.e5 = event5(est, proj, rule);
        for (std::size_t e = 0; e < ne; ++e) {
          BandChoice ch = choose_band(dh, bcs[e]);
          bool cov = true;
          if (ch.feasible) {
            const auto& c = est[static_cast<std::size_t>(ch.chosen.j - J.lo)];
            for (std::size_t i = 0; i < c.size(); ++i)
              if (std::abs(fu[i] - c[i]) > ch.half_width) {
                cov = false;
                break;
              }
          }
          o.covered.push_back(cov);
          o.feasible.push_back(ch.feasible);
          o.crossed.push_back(ch.gamma.crossed);
          o.gamma_in.push_back(ch.gamma.lo <= cg && cg <= ch.gamma.hi);
          o.width.push_back(2.0 * ch.half_width);
          o.glo.push_back(ch.gamma.lo);
          o.ghi.push_back(ch.gamma.hi);
          o.j.push_back(ch.chosen.j);
        }
      });

      for (std::size_t e = 0; e < ne; ++e) {
        CellResult c;
        c.f_id = fs.id();
        c.family = fs.family;
        c.gamma = cg;
        c.A = fs.A;
        c.n = n;
        c.sigma_n = sn;
        c.epsilon = cfg.eps_list[e];
        c.reps = cfg.reps;
        c.J = J;
        c.cbar = cbar;
        c.tilde_c = tc;
        c.cert = certs[e];
        int cov = 0, gin = 0, e4 = 0, e5 = 0, feas = 0;
        double jsum = 0;
        std::vector<double> glo, ghi, gw;
        for (const RepOutcome& o : out) {
          cov += o.covered[e];
          gin += o.gamma_in[e];
          e4 += o.e4;
          e5 += o.e5;
          c.crossed += o.crossed[e];
          c.widths.push_back(o.width[e]);
          glo.push_back(o.glo[e]);
          ghi.push_back(o.ghi[e]);
          gw.push_back(o.ghi[e] - o.glo[e]);
          if (o.feasible[e]) {
            ++feas;
            jsum += o.j[e];
          } else {
            ++c.infeasible;
          }
        }
        const double R = cfg.reps;
        c.coverage = cov / R;
        c.coverage_mcse = mcse(c.coverage, cfg.reps);
        c.width_median = empirical_quantile(c.widths, 0.5);
        c.width_beta = empirical_quantile(c.widths, cfg.beta);
        c.mean_j = feas ? jsum / feas : std::numeric_limits<double>::quiet_NaN();
        c.gamma_lo_median = median_of(glo);
        c.gamma_hi_median = median_of(ghi);
        c.gamma_width_median = median_of(gw);
        c.gamma_coverage = gin / R;
        c.gamma_mcse = mcse(c.gamma_coverage, cfg.reps);
        c.event4 = e4 / R;
        c.event5 = e5 / R;
        cells.push_back(std::move(c));
      }
    }
  }
  return cells;
}

std::vector<CellResult> worst_case(const std::vector<CellResult>& cells) {
  std::vector<CellResult> w;
  for (const CellResult& c : cells) {
    if (!c.cert.certified) continue;
    auto it = std::find_if(w.begin(), w.end(), [&](const CellResult& x) { return x.n == c.n && x.epsilon == c.epsilon; });
    if (it == w.end()) {
      CellResult x;
      x.f_id = "worst";
      x.family = "certified";
      x.n = c.n;
      x.sigma_n = c.sigma_n;
      x.epsilon = c.epsilon;
      x.reps = c.reps;
      x.J = c.J;
      x.cbar = c.cbar;
      x.tilde_c = c.tilde_c;
      x.cert.certified = true;
      x.coverage = 2.0;
      w.push_back(x);
      it = w.end() - 1;
    }
    if (c.coverage < it->coverage) {
      it->coverage = c.coverage;
      it->coverage_mcse = c.coverage_mcse;
    }
    it->width_median = std::max(it->width_median, c.width_median);
    it->width_beta = std::max(it->width_beta, c.width_beta);
    it->infeasible = std::max(it->infeasible, c.infeasible);
  }
  return w;
}

ExperimentResult run_with(const ExperimentConfig& cfg, const std::string& study) {
  auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig c = cfg;
  c.study = study;
  ExperimentResult r;
  r.study = study;
  r.cells = run_cells(c);
  r.worst = worst_case(r.cells);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

ExperimentResult run_coverage(const ExperimentConfig& cfg) { return run_with(cfg, "coverage"); }

ExperimentResult run_rate_scan(const ExperimentConfig& cfg) {
  ExperimentResult r = run_with(cfg, "rate-scan");
  for (const auto& fs : cfg.functions)
    for (double eps : cfg.eps_list) {
      std::vector<double> x, y;
      for (const CellResult& c : r.cells)
        if (c.f_id == fs.id() && c.epsilon == eps && std::isfinite(c.width_median)) {
          x.push_back(std::log(c.n));
          y.push_back(std::log(c.width_median));
        }
      if (x.size() < 4) throw std::runtime_error("rate-scan: fewer than 4 finite widths for " + fs.id());
      SlopeFit f = ols_slope(x, y);
      f.f_id = fs.id();
      f.fixed = eps;
      // the median width should not grow with n
      for (std::size_t i = 1; i < y.size(); ++i) f.monotone = f.monotone && y[i] <= y[i - 1];
      r.fits.push_back(f);
    }
  return r;
}

ExperimentResult run_eps_scan(const ExperimentConfig& cfg) {
  ExperimentResult r = run_with(cfg, "eps-scan");
  for (const auto& fs : cfg.functions)
    for (double n : cfg.n_list) {
      std::vector<std::pair<double, double>> pts;
      for (const CellResult& c : r.cells)
        if (c.f_id == fs.id() && c.n == n) pts.emplace_back(c.epsilon, c.width_median);
      std::sort(pts.begin(), pts.end());
      SlopeFit f;
      std::vector<double> x, y;
      bool mono = true;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) mono = mono && pts[i].second <= pts[i - 1].second;
        if (std::isfinite(pts[i].second)) {
          x.push_back(std::log(1.0 / pts[i].first));
          y.push_back(std::log(pts[i].second));
        }
      }
      if (x.size() >= 3) f = ols_slope(x, y);
      else f.slope = f.se = std::numeric_limits<double>::quiet_NaN();
      f.points = static_cast<int>(x.size());
      f.f_id = fs.id();
      f.fixed = n;
      f.monotone = mono;
      r.fits.push_back(f);
    }
  return r;
}

ExperimentResult run_gamma_ci_study(const ExperimentConfig& cfg) {
  ExperimentResult r = run_with(cfg, "gamma-ci");
  // log ratio of the median interval width against log n
  for (const auto& fs : cfg.functions)
    for (double eps : cfg.eps_list) {
      std::vector<double> x, y;
      for (const CellResult& c : r.cells)
        if (c.f_id == fs.id() && c.epsilon == eps) {
          x.push_back(std::log(c.n));
          y.push_back(c.gamma_width_median);
        }
      SlopeFit f;
      f.f_id = fs.id();
      f.fixed = eps;
      f.points = static_cast<int>(x.size());
      for (std::size_t i = 1; i < y.size(); ++i) f.monotone = f.monotone && y[i] < y[i - 1];
      if (x.size() >= 3) {
        SlopeFit o = ols_slope(x, y);
        f.slope = o.slope;
        f.se = o.se;
      } else if (x.size() == 2) {
        f.slope = (y[1] - y[0]) / (x[1] - x[0]);
      }
      r.fits.push_back(f);
    }
  return r;
}

ExperimentResult run_study(const ExperimentConfig& cfg) {
  if (cfg.study == "coverage") return run_coverage(cfg);
  if (cfg.study == "rate-scan") return run_rate_scan(cfg);
  if (cfg.study == "eps-scan") return run_eps_scan(cfg);
  if (cfg.study == "gamma-ci") return run_gamma_ci_study(cfg);
  throw std::invalid_argument("run_study: not a Monte Carlo study: " + cfg.study);
}

std::vector<CalibrationRow> run_calibration(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.study = "calibrate";
  c.validate();
  const Kernel K = c.make_kernel();
  CalibrationCache cache;
  std::vector<CalibrationRow> rows;
  for (double n : c.n_list) {
    CalibrationRow r;
    r.n = n;
    r.J = c.levels_for(n);
    r.target = c.calibration_target();
    r.reps = c.calib_reps;
    r.cbar = cache.get(K, r.J, r.target, r.reps, c.grid, c.seed, c.workers);
    rows.push_back(r);
  }
  return rows;
}

std::string results_csv(const ExperimentResult& r) {
  std::ostringstream os;
  os << "study,f_id,family,gamma,A,n,sigma_n,epsilon,reps,j_lo,j_hi,cbar,tilde_c,certified,holder_ok,ratio_min,"
        "ratio_max,coverage,coverage_mcse,width_median,width_beta,mean_j,gamma_lo_median,gamma_hi_median,"
        "gamma_width_median,gamma_coverage,gamma_mcse,event4,event5,infeasible,crossed\n";
  auto row = [&](const CellResult& c, bool agg) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    os << r.study << ',' << c.f_id << ',' << c.family << ',' << fmt(agg ? nan : c.gamma) << ','
       << fmt(agg ? nan : c.A) << ',' << fmt(c.n) << ',' << fmt(c.sigma_n) << ',' << fmt(c.epsilon) << ','
       << c.reps << ',' << c.J.lo << ',' << c.J.hi << ',' << fmt(c.cbar) << ',' << fmt(c.tilde_c) << ','
       << int(c.cert.certified) << ',' << int(c.cert.holder_ok) << ',' << fmt(agg ? nan : c.cert.ratio_min) << ','
       << fmt(agg ? nan : c.cert.ratio_max) << ',' << fmt(c.coverage) << ',' << fmt(c.coverage_mcse) << ','
       << fmt(c.width_median) << ',' << fmt(c.width_beta) << ',' << fmt(agg ? nan : c.mean_j) << ','
       << fmt(agg ? nan : c.gamma_lo_median) << ',' << fmt(agg ? nan : c.gamma_hi_median) << ','
       << fmt(agg ? nan : c.gamma_width_median) << ',' << fmt(agg ? nan : c.gamma_coverage) << ','
       << fmt(agg ? nan : c.gamma_mcse) << ',' << fmt(agg ? nan : c.event4) << ',' << fmt(agg ? nan : c.event5)
       << ',' << c.infeasible << ',' << (agg ? 0 : c.crossed) << '\n';
  };
  for (const auto& c : r.cells) row(c, false);
  for (const auto& c : r.worst) row(c, true);
  return os.str();
}

std::string summary_csv(const ExperimentResult& r) {
  std::ostringstream os;
  os << "study,f_id,fixed,slope,se,ci_lo,ci_hi,points,monotone\n";
  for (const auto& f : r.fits)
    os << r.study << ',' << f.f_id << ',' << fmt(f.fixed) << ',' << fmt(f.slope) << ',' << fmt(f.se) << ','
       << fmt(f.ci_lo()) << ',' << fmt(f.ci_hi()) << ',' << f.points << ',' << int(f.monotone) << '\n';
  return os.str();
}

void write_outputs(const std::string& dir, const ExperimentConfig& cfg, const ExperimentResult& r) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream os(std::filesystem::path(dir) / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + name);
    os << text;
  };
  put("results.csv", results_csv(r));
  if (!r.fits.empty()) put("summary.csv", summary_csv(r));
  put("config_echo", cfg.echo());
  std::ostringstream pd;
  const bool by_eps = r.study == "eps-scan";
  pd << "f_id," << (by_eps ? "epsilon" : "n") << ",width_median,width_beta\n";
  for (const auto& c : r.cells)
    pd << c.f_id << ',' << fmt(by_eps ? c.epsilon : c.n) << ',' << fmt(c.width_median) << ','
       << fmt(c.width_beta) << '\n';
  put("plotdata_width.csv", pd.str());
  put("timing.txt", "wall_seconds = " + fmt(r.wall_seconds) + "\nworkers = " + std::to_string(cfg.workers) + "\n");
}

}  // namespace selfsim
