#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace selfsim {

// Uniform grid over [lo, hi] with m cells, nodes lo + i*h for i = 0..m.
struct Grid {
  double lo = -0.25;
  double hi = 1.25;
  std::size_t m = 1u << 14;

  Grid() = default;
  Grid(double lo_, double hi_, std::size_t m_);

  double h() const { return (hi - lo) / static_cast<double>(m); }
  std::size_t nodes() const { return m + 1; }
  double node(std::size_t i) const { return lo + static_cast<double>(i) * h(); }
  double mid(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * h(); }

  // Index range [first, last] of nodes lying inside [a, b].
  std::pair<std::size_t, std::size_t> node_range(double a, double b) const;
  // Sub-grid spanned by nodes first..last; exact same node positions.
  Grid sub(std::size_t first, std::size_t last) const;
  // Nodes inside the estimation interval [0, 1].
  std::pair<std::size_t, std::size_t> unit_range() const { return node_range(0.0, 1.0); }

  bool operator==(const Grid& o) const { return lo == o.lo && hi == o.hi && m == o.m; }
};

// Real function sampled at the nodes of a grid; linear between nodes.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Grid g, std::vector<double> values);
  explicit GridFunction(Grid g) : grid_(g), values_(g.nodes(), 0.0) {}

  static GridFunction sample(const Grid& g, const std::function<double(double)>& fn);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  double operator()(double x) const;  // linear interpolation, zero outside the grid
  // Value at the midpoint of cell i.
  double at_mid(std::size_t i) const { return 0.5 * (values_[i] + values_[i + 1]); }

  // Restriction to the nodes first..last.
  GridFunction slice(std::size_t first, std::size_t last) const;
  // Restriction to the nodes inside [0, 1].
  GridFunction unit_slice() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double c);

 private:
  Grid grid_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

double sup_norm_on(const GridFunction& f, double a, double b);
double l2_norm(const GridFunction& f);
double holder_seminorm(const GridFunction& f, double gamma);

// Greatest integer strictly less than gamma.
int floor_strict(double gamma);

void write_csv(std::ostream& os, const GridFunction& f);
void write_csv(const std::string& path, const GridFunction& f);
GridFunction read_csv(const std::string& path);

}  // namespace selfsim
