#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "selfsim/band.hpp"
#include "selfsim/calibration.hpp"
#include "selfsim/config.hpp"
#include "selfsim/gamma_ci.hpp"
#include "selfsim/selfsim.hpp"

namespace selfsim {

struct FunctionSpec {
  std::string family = "g_tilde";  // g_tilde | f_tilde | bumps | composite | zero | file
  double gamma = 1.0;
  double A = 1.0;
  double delta = 0.5;   // f_tilde
  double eps_t = 0.25;  // f_tilde
  double bump_B = 0.5;  // bumps, composite
  double bump_n = 1e8;  // sets the bump scale
  double support_gap = 1.0;
  std::string path;  // file

  // Exponent the function is certified against (gamma - delta for f_tilde).
  double class_gamma() const;
  std::string id() const;
};

GridFunction build_function(const FunctionSpec& s, const Kernel& K, const Grid& g);

struct ExperimentConfig {
  std::string study = "coverage";  // coverage | rate-scan | eps-scan | gamma-ci | calibrate
  std::string kernel = "conv_poly";
  int kernel_power = 3;
  RegularityRanges ranges;
  std::vector<FunctionSpec> functions{FunctionSpec{}};
  std::vector<double> n_list{16384.0};
  std::vector<double> eps_list{0.1};
  double sigma = 1.0;
  double alpha = 0.05;
  double beta = 0.5;
  int reps = 300;
  std::uint64_t seed = 1;
  Grid grid;
  std::string out = "out";
  int calib_reps = 1000;
  double target = 0.0;   // 0: 1 - alpha
  double cbar = 0.0;     // 0: calibrate
  double tilde_c = 0.0;  // 0: estimate from probes
  int j_lo = 0;          // 0: default rule
  int j_hi = 0;          // 0: j_max of the grid
  int workers = 1;

  Kernel make_kernel() const { return Kernel::by_name(kernel, kernel_power); }
  double calibration_target() const { return target > 0.0 ? target : 1.0 - alpha; }
  LevelRange levels_for(double n) const;
  void validate() const;
  std::string echo() const;
};

ExperimentConfig experiment_config(const Config& c);

// Calibrated cbar per level range, computed once.
class CalibrationCache {
 public:
  double get(const Kernel& K, const LevelRange& J, double target, int reps, const Grid& g, std::uint64_t seed,
             int workers);

 private:
  std::mutex mu_;
  std::map<std::string, double> values_;
};

double resolve_tilde_c(const ExperimentConfig& cfg, const Kernel& K);

// Two sided bias check at the class exponent over the band levels: some
// B in the user range has eps B <= bias 2^{j gamma} <= C~ B for all j in J.
struct Certificate {
  bool certified = false;
  bool holder_ok = false;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double holder = 0.0;
};
Certificate certify(const GridFunction& f, double gamma, const Kernel& K, const LevelRange& J,
                    const RegularityRanges& r, double tilde_c, double tol = 0.0);

struct CellResult {
  std::string f_id;
  std::string family;
  double gamma = 0.0;
  double A = 0.0;
  double n = 0.0;
  double sigma_n = 0.0;
  double epsilon = 0.0;
  int reps = 0;
  LevelRange J;
  double cbar = 0.0;
  double tilde_c = 1.0;
  Certificate cert;
  double coverage = 0.0;
  double coverage_mcse = 0.0;
  double width_median = 0.0;
  double width_beta = 0.0;
  double mean_j = 0.0;
  double gamma_lo_median = 0.0;
  double gamma_hi_median = 0.0;
  double gamma_width_median = 0.0;
  double gamma_coverage = 0.0;
  double gamma_mcse = 0.0;
  double event4 = 0.0;
  double event5 = 0.0;
  int infeasible = 0;
  int crossed = 0;
  std::vector<double> widths;  // per replication, full band length 2 * half width
};

struct SlopeFit {
  std::string f_id;
  double fixed = 0.0;  // epsilon for rate scans, n for epsilon scans
  double slope = 0.0;
  double se = 0.0;
  int points = 0;
  bool monotone = true;
  double ci_lo() const { return slope - 2.0 * se; }
  double ci_hi() const { return slope + 2.0 * se; }
};

struct ExperimentResult {
  std::string study;
  std::vector<CellResult> cells;
  std::vector<CellResult> worst;  // per (n, epsilon) over certified functions
  std::vector<SlopeFit> fits;
  double wall_seconds = 0.0;
};

ExperimentResult run_coverage(const ExperimentConfig& cfg);
ExperimentResult run_rate_scan(const ExperimentConfig& cfg);
ExperimentResult run_eps_scan(const ExperimentConfig& cfg);
ExperimentResult run_gamma_ci_study(const ExperimentConfig& cfg);
ExperimentResult run_study(const ExperimentConfig& cfg);

struct CalibrationRow {
  double n = 0.0;
  LevelRange J;
  double cbar = 0.0;
  double target = 0.0;
  int reps = 0;
};
std::vector<CalibrationRow> run_calibration(const ExperimentConfig& cfg);

// Ordinary least squares slope of y on x with its standard error.
SlopeFit ols_slope(const std::vector<double>& x, const std::vector<double>& y);

std::string results_csv(const ExperimentResult& r);
std::string summary_csv(const ExperimentResult& r);
// results.csv, summary.csv, plotdata_width.csv, config_echo and timing.txt in dir.
void write_outputs(const std::string& dir, const ExperimentConfig& cfg, const ExperimentResult& r);

}  // namespace selfsim
