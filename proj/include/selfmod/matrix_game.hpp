#pragma once

#include <array>
#include <string>
#include <vector>

#include "selfmod/errors.hpp"

namespace selfmod {

// Two-player, two-strategy normal form. row[i][j] / col[i][j] are the
// payoffs when the row player picks strategy i and the column player j.
struct NormalForm2x2 {
  std::array<std::string, 2> row_actions{"A", "B"};
  std::array<std::string, 2> col_actions{"A", "B"};
  double row[2][2] = {{0, 0}, {0, 0}};
  double col[2][2] = {{0, 0}, {0, 0}};
};

struct Equilibrium2x2 {
  enum class Kind { pure, mixed };
  Kind kind = Kind::pure;
  // pure
  int row_action = 0;
  int col_action = 0;
  // mixed: probability each player puts on their FIRST strategy
  double row_p0 = 0.0;
  double col_p0 = 0.0;
  double row_value = 0.0;
  double col_value = 0.0;
};

// All pure Nash equilibria (cell order) plus the interior mixed equilibrium
// from the indifference conditions when it exists.
std::vector<Equilibrium2x2> solve_2x2(const NormalForm2x2& g);

// One discrete Euler step of two-strategy replicator dynamics against the
// row payoffs of g: share growth proportional to fitness minus mean
// fitness, re-projected onto the simplex. Requires dt in (0, 0.1].
std::array<double, 2> replicator_step(const std::array<double, 2>& shares,
                                      const NormalForm2x2& g, double dt);

}  // namespace selfmod
