#pragma once

#include <memory>
#include <vector>

#include "selfsim/grid.hpp"
#include "selfsim/kernel.hpp"

namespace selfsim {

// Multilevel linear operator v -> (sum_i K_j(t, x_i) v_i h) evaluated at the
// nodes t of the grid inside [0, 1], for a fixed set of levels. The input v
// holds one value per cell (midpoint sample or increment / h). The discrete
// kernel weights of each level are normalized to sum to one.
class LevelBank {
 public:
  LevelBank(const Kernel& K, const Grid& g, std::vector<int> levels);
  ~LevelBank();
  LevelBank(const LevelBank&) = delete;
  LevelBank& operator=(const LevelBank&) = delete;

  const Grid& grid() const { return grid_; }
  const std::vector<int>& levels() const { return levels_; }
  std::size_t first() const { return first_; }
  std::size_t last() const { return last_; }
  std::size_t out_size() const { return last_ - first_ + 1; }
  Grid out_grid() const { return grid_.sub(first_, last_); }

  // out[l] receives the values at level levels()[l]; thread safe.
  void apply(const std::vector<double>& v, std::vector<std::vector<double>>& out) const;

 private:
  struct Conv;
  struct Wave;
  Grid grid_;
  std::vector<int> levels_;
  std::size_t first_ = 0, last_ = 0;
  KernelKind kind_;
  std::unique_ptr<Conv> conv_;
  std::vector<Wave> wave_;
};

// Shared, cached bank for (kernel, grid, levels).
std::shared_ptr<const LevelBank> level_bank(const Kernel& K, const Grid& g, const std::vector<int>& levels);

// Cell midpoint samples of a grid function.
std::vector<double> mid_values(const GridFunction& f);

}  // namespace selfsim
