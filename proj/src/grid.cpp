#include "selfsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace selfsim {

Grid::Grid(double lo_, double hi_, std::size_t m_) : lo(lo_), hi(hi_), m(m_) {
  if (!(lo < hi)) throw std::invalid_argument("Grid: need lo < hi");
  if (m < 2) throw std::invalid_argument("Grid: need m >= 2");
}

std::pair<std::size_t, std::size_t> Grid::node_range(double a, double b) const {
  if (a < lo - 1e-12 || b > hi + 1e-12 || a > b)
    throw std::out_of_range("interval outside grid range");
  const double step = h();
  const double tol = 1e-9;
  double fa = std::ceil((a - lo) / step - tol);
  double fb = std::floor((b - lo) / step + tol);
  fa = std::max(fa, 0.0);
  fb = std::min(fb, static_cast<double>(m));
  if (fb < fa) throw std::out_of_range("interval contains no grid node");
  return {static_cast<std::size_t>(fa), static_cast<std::size_t>(fb)};
}

Grid Grid::sub(std::size_t first, std::size_t last) const {
  if (last <= first || last > m) throw std::out_of_range("Grid::sub: bad node range");
  Grid g;
  g.lo = node(first);
  g.hi = node(last);
  g.m = last - first;
  return g;
}

GridFunction::GridFunction(Grid g, std::vector<double> values)
    : grid_(g), values_(std::move(values)) {
  if (values_.size() != grid_.nodes())
    throw std::invalid_argument("GridFunction: values length must be m+1");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite value");
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(double)>& fn) {
  std::vector<double> v(g.nodes());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(g.node(i));
  return GridFunction(g, std::move(v));
}

double GridFunction::operator()(double x) const {
  const double step = grid_.h();
  double u = (x - grid_.lo) / step;
  if (u < 0.0 || u > static_cast<double>(grid_.m)) return 0.0;
  auto i = static_cast<std::size_t>(std::floor(u));
  if (i >= grid_.m) return values_.back();
  double w = u - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

GridFunction GridFunction::slice(std::size_t first, std::size_t last) const {
  Grid g = grid_.sub(first, last);
  std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(first),
                        values_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  return GridFunction(g, std::move(v));
}

GridFunction GridFunction::unit_slice() const {
  auto [a, b] = grid_.unit_range();
  return slice(a, b);
}

static void require_same(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("GridFunction: grid mismatch");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

double sup_norm_on(const GridFunction& f, double a, double b) {
  auto [i0, i1] = f.grid().node_range(a, b);
  double s = 0.0;
  for (std::size_t i = i0; i <= i1; ++i) s = std::max(s, std::abs(f[i]));
  return s;
}

double l2_norm(const GridFunction& f) {
  const auto& v = f.values();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) s += 0.5 * (v[i] * v[i] + v[i + 1] * v[i + 1]);
  return std::sqrt(s * f.grid().h());
}

int floor_strict(double gamma) {
  double c = std::ceil(gamma);
  return static_cast<int>(c) - 1;
}

// Central difference approximation of the k-th derivative; the result for
// node i sits at index i - k_half_width of the returned vector.
static std::vector<double> derivative(const std::vector<double>& v, int k, double h) {
  std::vector<double> d = v;
  int order = k;
  while (order >= 2) {
    if (d.size() < 3) return {};
    std::vector<double> nxt(d.size() - 2);
    for (std::size_t i = 0; i < nxt.size(); ++i) nxt[i] = (d[i] - 2.0 * d[i + 1] + d[i + 2]) / (h * h);
    d.swap(nxt);
    order -= 2;
  }
  if (order == 1) {
    if (d.size() < 3) return {};
    std::vector<double> nxt(d.size() - 2);
    for (std::size_t i = 0; i < nxt.size(); ++i) nxt[i] = (d[i + 2] - d[i]) / (2.0 * h);
    d.swap(nxt);
  }
  return d;
}

double holder_seminorm(const GridFunction& f, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("holder_seminorm: gamma must be positive");
  const int k = floor_strict(gamma);
  const double alpha = gamma - k;
  if (f.grid().m < (std::size_t{1} << (k + 4)))
    throw std::invalid_argument("holder_seminorm: grid too coarse for derivative order");
  const double h = f.grid().h();
  std::vector<double> g = derivative(f.values(), k, h);
  const std::size_t n = g.size();
  if (n < 6) return 0.0;

  // Separations: every d up to 256 cells, then geometric steps of 2%.
  std::vector<std::size_t> seps;
  for (std::size_t d = 4; d < n && d <= 256; ++d) seps.push_back(d);
  for (double d = 256.0 * 1.02; d < static_cast<double>(n - 1); d *= 1.02)
    seps.push_back(static_cast<std::size_t>(std::ceil(d)));
  if (n - 1 >= 4) seps.push_back(n - 1);
  std::sort(seps.begin(), seps.end());
  seps.erase(std::unique(seps.begin(), seps.end()), seps.end());

  double best = 0.0;
  for (std::size_t d : seps) {
    double mx = 0.0;
    for (std::size_t i = 0; i + d < n; ++i) mx = std::max(mx, std::abs(g[i + d] - g[i]));
    best = std::max(best, mx / std::pow(static_cast<double>(d) * h, alpha));
  }
  return best;
}

void write_csv(std::ostream& os, const GridFunction& f) {
  os << "x,value\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) os << f.grid().node(i) << ',' << f[i] << '\n';
}

void write_csv(const std::string& path, const GridFunction& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_csv(os, f);
}

GridFunction read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(is, line);
  if (line.rfind("x,value", 0) != 0) throw std::runtime_error(path + ": expected header x,value");
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    xs.push_back(std::stod(a));
    vs.push_back(std::stod(b));
  }
  if (xs.size() < 3) throw std::runtime_error(path + ": too few rows");
  Grid g(xs.front(), xs.back(), xs.size() - 1);
  return GridFunction(g, std::move(vs));
}

}  // namespace selfsim
