#include "selfmod/matrix_game.hpp"

#include <cmath>

namespace selfmod {

std::vector<Equilibrium2x2> solve_2x2(const NormalForm2x2& g) {
  std::vector<Equilibrium2x2> out;

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      bool row_best = g.row[i][j] >= g.row[1 - i][j];
      bool col_best = g.col[i][j] >= g.col[i][1 - j];
      if (row_best && col_best) {
        Equilibrium2x2 eq;
        eq.kind = Equilibrium2x2::Kind::pure;
        eq.row_action = i;
        eq.col_action = j;
        eq.row_value = g.row[i][j];
        eq.col_value = g.col[i][j];
        out.push_back(eq);
      }
    }
  }

  // Interior mixed point: the row mix x makes the column player
  // indifferent, and vice versa.
  double d0 = g.col[0][0] - g.col[0][1];
  double d1 = g.col[1][0] - g.col[1][1];
  double e0 = g.row[0][0] - g.row[1][0];
  double e1 = g.row[0][1] - g.row[1][1];
  if (d1 - d0 != 0.0 && e1 - e0 != 0.0) {
    double x = d1 / (d1 - d0);  // row P(first strategy)
    double y = e1 / (e1 - e0);  // col P(first strategy)
    const double tol = 1e-9;
    if (x > tol && x < 1.0 - tol && y > tol && y < 1.0 - tol) {
      Equilibrium2x2 eq;
      eq.kind = Equilibrium2x2::Kind::mixed;
      eq.row_p0 = x;
      eq.col_p0 = y;
      double rv = 0.0, cv = 0.0;
      double px[2] = {x, 1.0 - x};
      double py[2] = {y, 1.0 - y};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          rv += px[i] * py[j] * g.row[i][j];
          cv += px[i] * py[j] * g.col[i][j];
        }
      }
      eq.row_value = rv;
      eq.col_value = cv;
      out.push_back(eq);
    }
  }
  return out;
}

std::array<double, 2> replicator_step(const std::array<double, 2>& shares,
                                      const NormalForm2x2& g, double dt) {
  if (!(dt > 0.0) || dt > 0.1) {
    throw Error(Errc::invalid_argument, "replicator step needs dt in (0, 0.1]");
  }
  double sum = shares[0] + shares[1];
  if (shares[0] < 0.0 || shares[1] < 0.0 || std::abs(sum - 1.0) > 1e-9) {
    throw Error(Errc::invalid_state, "shares are off the simplex");
  }

  double f0 = shares[0] * g.row[0][0] + shares[1] * g.row[0][1];
  double f1 = shares[0] * g.row[1][0] + shares[1] * g.row[1][1];
  double mean = shares[0] * f0 + shares[1] * f1;

  std::array<double, 2> next{shares[0] + dt * shares[0] * (f0 - mean),
                             shares[1] + dt * shares[1] * (f1 - mean)};
  for (double& s : next) {
    if (s < 0.0) s = 0.0;
  }
  double total = next[0] + next[1];
  if (total <= 0.0) {
    throw Error(Errc::invalid_state, "replicator step collapsed the simplex");
  }
  if (total != 1.0) {
    next[0] /= total;
    next[1] /= total;
  }
  return next;
}

}  // namespace selfmod
