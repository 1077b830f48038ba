#include "selfsim/levels.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace selfsim {

namespace {

std::mutex& plan_mutex() {
  static std::mutex mu;
  return mu;
}

struct RealBuf {
  double* p;
  explicit RealBuf(std::size_t n) : p(fftw_alloc_real(n)) {
    if (!p) throw std::bad_alloc();
  }
  ~RealBuf() { fftw_free(p); }
};

struct CplxBuf {
  fftw_complex* p;
  explicit CplxBuf(std::size_t n) : p(fftw_alloc_complex(n)) {
    if (!p) throw std::bad_alloc();
  }
  ~CplxBuf() { fftw_free(p); }
};

}  // namespace

struct LevelBank::Conv {
  std::size_t N = 0;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  std::vector<std::vector<std::complex<double>>> spectra;

  ~Conv() {
    std::lock_guard<std::mutex> lk(plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
};

struct LevelBank::Wave {
  int kmin = 0;
  std::vector<std::size_t> cstart;   // first cell of each coefficient window
  std::vector<std::size_t> coff;     // offset into cw
  std::vector<std::size_t> clen;
  std::vector<double> cw;
  std::vector<int> node_k0;          // first coefficient used at each output node
  std::vector<double> node_w;        // four weights per output node
};

static double bspline3(double u) {
  double a = std::abs(u);
  if (a >= 2.0) return 0.0;
  if (a >= 1.0) {
    double b = 2.0 - a;
    return b * b * b / 6.0;
  }
  return (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0;
}

LevelBank::LevelBank(const Kernel& K, const Grid& g, std::vector<int> levels)
    : grid_(g), levels_(std::move(levels)), kind_(K.kind()) {
  if (levels_.empty()) throw std::invalid_argument("LevelBank: empty level set");
  auto r = grid_.unit_range();
  first_ = r.first;
  last_ = r.second;
  const double h = grid_.h();
  const std::size_t m = grid_.m;
  for (int j : levels_) {
    if (std::ldexp(K.support_radius(), -j) < 2.0 * h)
      throw std::invalid_argument("kernel under-resolved at level " + std::to_string(j));
  }

  if (kind_ == KernelKind::convolution) {
    conv_ = std::make_unique<Conv>();
    const std::size_t N = m;
    conv_->N = N;
    {
      RealBuf in(N);
      CplxBuf out(N / 2 + 1);
      std::lock_guard<std::mutex> lk(plan_mutex());
      conv_->fwd = fftw_plan_dft_r2c_1d(static_cast<int>(N), in.p, out.p, FFTW_ESTIMATE);
      conv_->inv = fftw_plan_dft_c2r_1d(static_cast<int>(N), out.p, in.p, FFTW_ESTIMATE);
    }
    for (int j : levels_) {
      const double s = std::ldexp(1.0, j);
      const long R = static_cast<long>(std::ceil(1.0 / (s * h))) + 1;
      std::vector<double> w(N, 0.0);
      long kmin = R, kmax = -R;
      double total = 0.0;
      for (long k = -R; k <= R; ++k) {
        double val = K.profile(s * (static_cast<double>(k) + 0.5) * h);
        if (val == 0.0) continue;
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
        std::size_t idx = static_cast<std::size_t>((k % static_cast<long>(N) + static_cast<long>(N)) %
                                                   static_cast<long>(N));
        w[idx] += val;
        total += val;
      }
      if (static_cast<long>(first_) + kmin < 0 || static_cast<long>(last_) + kmax > static_cast<long>(m) - 1 ||
          2 * R >= static_cast<long>(N))
        throw std::invalid_argument("grid too narrow for level " + std::to_string(j));
      for (double& x : w) x /= total;
      RealBuf in(N);
      CplxBuf out(N / 2 + 1);
      for (std::size_t i = 0; i < N; ++i) in.p[i] = w[i];
      fftw_execute_dft_r2c(conv_->fwd, in.p, out.p);
      std::vector<std::complex<double>> spec(N / 2 + 1);
      for (std::size_t i = 0; i < spec.size(); ++i)
        spec[i] = std::complex<double>(out.p[i][0], -out.p[i][1]) / static_cast<double>(N);
      conv_->spectra.push_back(std::move(spec));
    }
  } else {
    for (int j : levels_) {
      Wave wv;
      const double s = std::ldexp(1.0, j);
      const std::size_t nout = out_size();
      wv.node_k0.resize(nout);
      wv.node_w.resize(4 * nout);
      int kmin = 1 << 30, kmax = -(1 << 30);
      for (std::size_t t = 0; t < nout; ++t) {
        double y = s * grid_.node(first_ + t);
        int k0 = static_cast<int>(std::floor(y - 2.0)) + 1;
        wv.node_k0[t] = k0;
        for (int q = 0; q < 4; ++q) wv.node_w[4 * t + q] = bspline3(y - (k0 + q));
        kmin = std::min(kmin, k0);
        kmax = std::max(kmax, k0 + 3);
      }
      wv.kmin = kmin;
      for (int k = kmin; k <= kmax; ++k) {
        double xa = (k - 2) / s, xb = (k + 2) / s;
        double ia = std::ceil((xa - grid_.lo) / h - 0.5);
        double ib = std::floor((xb - grid_.lo) / h - 0.5);
        if (ia < 0.0 || ib > static_cast<double>(m) - 1.0)
          throw std::invalid_argument("grid too narrow for level " + std::to_string(j));
        auto i0 = static_cast<std::size_t>(ia), i1 = static_cast<std::size_t>(ib);
        wv.cstart.push_back(i0);
        wv.coff.push_back(wv.cw.size());
        double total = 0.0;
        std::size_t len = 0;
        for (std::size_t i = i0; i <= i1; ++i) {
          double val = bspline3(s * grid_.mid(i) - k);
          wv.cw.push_back(val);
          total += val;
          ++len;
        }
        for (std::size_t q = wv.cw.size() - len; q < wv.cw.size(); ++q) wv.cw[q] /= total;
        wv.clen.push_back(len);
      }
      wave_.push_back(std::move(wv));
    }
  }
}

LevelBank::~LevelBank() = default;

void LevelBank::apply(const std::vector<double>& v, std::vector<std::vector<double>>& out) const {
  if (v.size() != grid_.m) throw std::invalid_argument("LevelBank::apply: need one value per cell");
  out.resize(levels_.size());
  const std::size_t nout = out_size();
  if (kind_ == KernelKind::convolution) {
    const std::size_t N = conv_->N, nf = N / 2 + 1;
    RealBuf in(N);
    CplxBuf spec(nf), tmp(nf);
    for (std::size_t i = 0; i < N; ++i) in.p[i] = v[i];
    fftw_execute_dft_r2c(conv_->fwd, in.p, spec.p);
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      const auto& w = conv_->spectra[l];
      for (std::size_t i = 0; i < nf; ++i) {
        double a = spec.p[i][0], b = spec.p[i][1];
        double c = w[i].real(), d = w[i].imag();
        tmp.p[i][0] = a * c - b * d;
        tmp.p[i][1] = a * d + b * c;
      }
      fftw_execute_dft_c2r(conv_->inv, tmp.p, in.p);
      out[l].assign(in.p + first_, in.p + first_ + nout);
    }
    return;
  }
  std::vector<double> coef;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const Wave& wv = wave_[l];
    coef.assign(wv.cstart.size(), 0.0);
    for (std::size_t c = 0; c < coef.size(); ++c) {
      const double* w = wv.cw.data() + wv.coff[c];
      const double* x = v.data() + wv.cstart[c];
      double acc = 0.0;
      for (std::size_t q = 0; q < wv.clen[c]; ++q) acc += w[q] * x[q];
      coef[c] = acc;
    }
    auto& o = out[l];
    o.resize(nout);
    for (std::size_t t = 0; t < nout; ++t) {
      std::size_t base = static_cast<std::size_t>(wv.node_k0[t] - wv.kmin);
      const double* w = wv.node_w.data() + 4 * t;
      o[t] = w[0] * coef[base] + w[1] * coef[base + 1] + w[2] * coef[base + 2] + w[3] * coef[base + 3];
    }
  }
}

std::shared_ptr<const LevelBank> level_bank(const Kernel& K, const Grid& g, const std::vector<int>& levels) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const LevelBank>> cache;
  std::ostringstream key;
  key.precision(17);
  key << K.id() << '|' << g.lo << '|' << g.hi << '|' << g.m;
  for (int j : levels) key << '|' << j;
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key.str());
    if (it != cache.end()) return it->second;
  }
  auto bank = std::make_shared<const LevelBank>(K, g, levels);
  std::lock_guard<std::mutex> lk(mu);
  if (cache.size() > 64) cache.clear();
  return cache.emplace(key.str(), bank).first->second;
}

std::vector<double> mid_values(const GridFunction& f) {
  std::vector<double> v(f.grid().m);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.at_mid(i);
  return v;
}

}  // namespace selfsim
