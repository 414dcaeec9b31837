#pragma once

// Reference map pairs for the figure series, numbered 1..7.

#include <string>

#include <vector>

#include "qcompat/channel.hpp"
#include "qcompat/robustness.hpp"

namespace qcompat {

struct FigureSpec {
  int id;
  DynamicalMap map1;
  DynamicalMap map2;
  bool teleport_columns;  // adds n_value, f_max of map2
  std::string description;
};

inline constexpr int kFigureCount = 7;

/// Throws DomainError for ids outside 1..7.
FigureSpec figure_spec(int id, const FamilyParams& params = {});

/// Sweep of the figure's pair, with the teleportation extras when the figure has them.
std::vector<SweepRecord> run_figure(const FigureSpec& fig, const std::vector<double>& t_grid, const SweepOptions& opts);

}  // namespace qcompat
