#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "selfsim/experiment.hpp"
#include "selfsim/rng.hpp"

using namespace selfsim;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int workers = 0;
};

ExperimentConfig load(const Common& o) {
  Config c = o.config.empty() ? Config{} : Config::load(o.config);
  ExperimentConfig e = experiment_config(c);
  if (o.has_seed) e.seed = o.seed;
  if (!o.out.empty()) e.out = o.out;
  if (o.workers > 0) e.workers = o.workers;
  return e;
}

void add_common(CLI::App* app, Common& o) {
  app->add_option("--config", o.config, "flat key = value config file");
  app->add_option("--seed", o.seed, "master seed")->each([&](const std::string&) { o.has_seed = true; });
  app->add_option("--out", o.out, "output directory");
  app->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
}

std::filesystem::path out_dir(const ExperimentConfig& e) {
  std::filesystem::create_directories(e.out);
  return e.out;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << s;
}

// Observation from file, or synthesized from the first function and first n.
Observation observation_for(const ExperimentConfig& e, const Kernel& K, const std::string& path) {
  if (!path.empty()) return read_observation_csv(path);
  GridFunction f = build_function(e.functions.front(), K, e.grid);
  return synthesize(f, e.sigma, e.n_list.front(), e.grid, derive_seed(e.seed, 0, 0));
}

CriticalValueRule rule_for(const ExperimentConfig& e, const Kernel& K, const Observation& obs) {
  LevelRange J = e.levels_for(obs.n);
  CalibrationCache cache;
  double cbar = e.cbar > 0.0 ? e.cbar
                             : cache.get(K, J, e.calibration_target(), e.calib_reps, obs.grid, e.seed, e.workers);
  return {cbar, obs.sigma_n(), J};
}

json interval_json(const GammaInterval& g) {
  json w = json::array();
  for (const auto& x : g.witnesses) w.push_back({{"j1", x.j1}, {"j2", x.j2}, {"upper", x.upper}});
  return {{"lo", g.lo}, {"hi", g.hi}, {"crossed", g.crossed}, {"witnesses", w}};
}

int cmd_calibrate(const ExperimentConfig& e) {
  auto rows = run_calibration(e);
  std::ostringstream os;
  os << "n,j_lo,j_hi,target,reps,cbar\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g", r.cbar);
    os << r.n << ',' << r.J.lo << ',' << r.J.hi << ',' << r.target << ',' << r.reps << ',' << buf << '\n';
  }
  auto dir = out_dir(e);
  write_text(dir / "calibration.csv", os.str());
  write_text(dir / "config_echo", e.echo());
  std::cout << os.str();
  return 0;
}

int cmd_band(const ExperimentConfig& e, const std::string& obs_path) {
  Kernel K = e.make_kernel();
  Observation obs = observation_for(e, K, obs_path);
  BandConfig cfg;
  cfg.epsilon = e.eps_list.front();
  cfg.ranges = e.ranges;
  cfg.ranges.epsilon = cfg.epsilon;
  cfg.tilde_c = resolve_tilde_c(e, K);
  cfg.rule = rule_for(e, K, obs);
  BandResult b = build_band(obs, K, cfg);
  auto dir = out_dir(e);
  {
    std::ofstream os(dir / "band.csv");
    os.precision(17);
    os << "x,lower,center,upper\n";
    for (std::size_t i = 0; i < b.center.size(); ++i) {
      double c = b.center[i];
      os << b.center.grid().node(i) << ',' << c - b.half_width << ',' << c << ',' << c + b.half_width << '\n';
    }
  }
  json meta = {{"feasible", b.feasible},
               {"half_width", b.feasible ? json(b.half_width) : json(nullptr)},
               {"j", b.chosen.j},
               {"j1", b.chosen.j1},
               {"j2", b.chosen.j2},
               {"gamma", interval_json(b.gamma)},
               {"cbar", cfg.rule.cbar},
               {"sigma_n", cfg.rule.sigma_n},
               {"j_lo", cfg.rule.J.lo},
               {"j_hi", cfg.rule.J.hi},
               {"epsilon", cfg.epsilon},
               {"tilde_c", cfg.tilde_c},
               {"kernel", K.id()}};
  write_text(dir / "band.json", meta.dump(2) + "\n");
  std::cout << meta.dump(2) << "\n";
  if (!b.feasible) std::cerr << "band infeasible: every triple has a = 0 for this level range and epsilon\n";
  return 0;
}

int cmd_gamma_single(const ExperimentConfig& e, const std::string& obs_path) {
  Kernel K = e.make_kernel();
  Observation obs = observation_for(e, K, obs_path);
  auto rule = rule_for(e, K, obs);
  BandConfig cfg;
  cfg.epsilon = e.eps_list.front();
  cfg.ranges = e.ranges;
  cfg.tilde_c = resolve_tilde_c(e, K);
  auto gi = gamma_interval(obs, K, rule, cfg.effective_ranges(), default_pairs(rule.J));
  json meta = interval_json(gi);
  meta["cbar"] = rule.cbar;
  meta["j_lo"] = rule.J.lo;
  meta["j_hi"] = rule.J.hi;
  write_text(out_dir(e) / "gamma_ci.json", meta.dump(2) + "\n");
  std::cout << meta.dump(2) << "\n";
  return 0;
}

int cmd_study(ExperimentConfig e, const std::string& study) {
  e.study = study;
  ExperimentResult r = run_study(e);
  write_outputs(e.out, e, r);
  std::cout << results_csv(r);
  if (!r.fits.empty()) std::cout << summary_csv(r);
  for (const auto& c : r.cells)
    if (!c.cert.certified)
      std::cerr << "warning: " << c.f_id << " at n=" << c.n << " not certified; coverage is diagnostic only\n";
  return 0;
}

int cmd_gen(ExperimentConfig e, const std::string& family, const std::string& path) {
  Kernel K = e.make_kernel();
  FunctionSpec s = e.functions.front();
  if (!family.empty()) s.family = family;
  GridFunction f = build_function(s, K, e.grid);
  auto dir = out_dir(e);
  std::string target = path.empty() ? (dir / (s.id() + ".csv")).string() : path;
  write_csv(target, f);
  std::cout << target << "\n";
  return 0;
}

int cmd_check(const ExperimentConfig& e, const std::vector<double>& cls, int j_hi, const std::string& input) {
  if (cls.size() != 4) throw std::invalid_argument("--class expects gamma,B,epsilon,ell_lo");
  Kernel K = e.make_kernel();
  GridFunction f = input.empty() ? build_function(e.functions.front(), K, e.grid) : read_csv(input);
  SelfSimClassSpec spec;
  spec.gamma = cls[0];
  spec.B = cls[1];
  spec.epsilon = cls[2];
  spec.ell_lo = static_cast<int>(cls[3]);
  spec.kernel = K;
  spec.tilde_c = e.tilde_c > 0.0 ? e.tilde_c : 1.0;
  if (j_hi <= 0) j_hi = j_max(K, f.grid());
  auto rep = check_membership(f, spec, j_hi);
  auto dir = out_dir(e);
  write_membership_csv((dir / "membership.csv").string(), rep, spec);
  std::cout << "self_similar=" << rep.self_similar() << " holder=" << rep.holder << " holder_ok=" << rep.holder_ok
            << " member=" << rep.member() << "\n";
  return rep.member() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive confidence bands under self-similarity"};
  app.require_subcommand(1);
  Common o;
  std::string obs_path, family, gen_path, input;
  std::vector<double> cls;
  int j_hi = 0;

  auto* cal = app.add_subcommand("calibrate", "Monte Carlo calibration of cbar per level range");
  auto* band = app.add_subcommand("band", "band for one observation");
  auto* gci = app.add_subcommand("gamma-ci", "interval for gamma: one observation, or the study with no --observation");
  auto* gen = app.add_subcommand("gen", "write a test function as CSV");
  auto* chk = app.add_subcommand("check", "membership report for a function");
  auto* cov = app.add_subcommand("coverage", "coverage study");
  auto* rate = app.add_subcommand("rate-scan", "width against n");
  auto* eps = app.add_subcommand("eps-scan", "width against epsilon");
  for (auto* s : {cal, band, gci, gen, chk, cov, rate, eps}) add_common(s, o);
  band->add_option("--observation", obs_path, "observation CSV (x_mid,dY)");
  gci->add_option("--observation", obs_path, "observation CSV (x_mid,dY)");
  gen->add_option("--family", family, "g_tilde|f_tilde|bumps|composite|zero");
  gen->add_option("--file", gen_path, "output path");
  chk->add_option("--class", cls, "gamma,B,epsilon,ell_lo")->delimiter(',')->required();
  chk->add_option("--j-hi", j_hi, "highest level checked");
  chk->add_option("--input", input, "function CSV (x,value)");

  CLI11_PARSE(app, argc, argv);
  try {
    ExperimentConfig e = load(o);
    if (cal->parsed()) return cmd_calibrate(e);
    if (band->parsed()) return cmd_band(e, obs_path);
    if (gci->parsed()) return obs_path.empty() ? cmd_study(e, "gamma-ci") : cmd_gamma_single(e, obs_path);
    if (gen->parsed()) return cmd_gen(e, family, gen_path);
    if (chk->parsed()) return cmd_check(e, cls, j_hi, input);
    if (cov->parsed()) return cmd_study(e, "coverage");
    if (rate->parsed()) return cmd_study(e, "rate-scan");
    if (eps->parsed()) return cmd_study(e, "eps-scan");
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 1;
}
