// Convergence sweeps behind `pobs sweep`.

#pragma once

#include <string>
#include <vector>

#include "pobs/canonical.hpp"
#include "pobs/evolution.hpp"

namespace pobs {

/// n,epsilon,trace_residual,interior_max_dev,edge_defect_weight
std::string weyl_sweep_csv(const std::vector<LimitRow>& rows);

struct ConvergenceRow {
  int n = 0;
  double epsilon = 0.0;
  EquationKind equation = EquationKind::Heisenberg;
  double tau = 0.0;
  double residual = 0.0;
  double ratio = 0.0;  // NaN on the first row of each study
};

/// Oscillator H = P^2/2 + Q^2/2 on 2n levels with epsilon = sqrt(pi / n),
/// so the coordinate and momentum windows match; tau = 0.1 / (pi n) keeps
/// tau ||H|| near 0.1. Heisenberg (O = Q), Schroedinger and von Neumann
/// residuals for a Gaussian packet of width sqrt(n) sites, over `halvings`
/// halvings. Rows are evaluated concurrently and returned in n order.
std::vector<ConvergenceRow> convergence_sweep(const std::vector<int>& n_list, int halvings = 3);
std::string convergence_sweep_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace pobs
