#include "pobs/sweep.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pobs/errors.hpp"
#include "pobs/matrix_io.hpp"
#include "pobs/parallel.hpp"

namespace pobs {

std::string weyl_sweep_csv(const std::vector<LimitRow>& rows) {
  std::ostringstream os;
  os << "n,epsilon,trace_residual,interior_max_dev,edge_defect_weight\n";
  for (const auto& r : rows) {
    os << r.n << ',' << io::csv_number(r.epsilon) << ',' << io::csv_number(r.trace_residual) << ','
       << io::csv_number(r.interior_max_dev) << ',' << io::csv_number(r.edge_defect_weight) << '\n';
  }
  return os.str();
}

namespace {

std::vector<ConvergenceRow> convergence_rows(int n, int halvings) {
  const double eps = std::sqrt(std::numbers::pi / n);
  const auto pair = make_canonical_pair(make_position(n, eps), 1.0);
  EvalContext ctx(pair.dim());
  ctx.bind("Q", pair.q.observable()).bind("P", pair.p);
  const Hamiltonian h(parse_expr("P^2/2 + Q^2/2"), ctx);
  const double tau = 0.1 / (std::numbers::pi * n);
  const EvolutionEngine engine(h, TimeGrid::make(tau, 1));

  Vector g(pair.dim());
  const double sigma = smearing_width(n);
  for (int j = -n; j < n; ++j) g(j + n) = std::exp(-0.5 * (j / sigma) * (j / sigma));
  const StateVector psi = StateVector::normalized(g);
  const ObservableExpr q = parse_expr("Q");

  std::vector<ConvergenceRow> rows;
  for (auto kind : {EquationKind::Heisenberg, EquationKind::Schrodinger, EquationKind::VonNeumann}) {
    const auto study = halving_study(engine, kind, q, psi, halvings);
    for (std::size_t i = 0; i < study.residuals.size(); ++i) {
      rows.push_back(ConvergenceRow{n, eps, kind, study.taus[i], study.residuals[i],
                                    i == 0 ? std::nan("") : study.ratios[i - 1]});
    }
  }
  return rows;
}

}  // namespace

std::vector<ConvergenceRow> convergence_sweep(const std::vector<int>& n_list, int halvings) {
  for (int n : n_list) {
    if (n < 2) throw InvalidArgument("convergence sweep: n must be >= 2");
  }
  std::vector<int> sorted = n_list;
  std::stable_sort(sorted.begin(), sorted.end());
  const auto blocks =
      par::map_indexed(sorted.size(), [&](std::size_t i) { return convergence_rows(sorted[i], halvings); });
  std::vector<ConvergenceRow> out;
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::string convergence_sweep_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream os;
  os << "n,epsilon,equation,tau,residual,ratio\n";
  for (const auto& r : rows) {
    os << r.n << ',' << io::csv_number(r.epsilon) << ',' << to_string(r.equation) << ','
       << io::csv_number(r.tau) << ',' << io::csv_number(r.residual) << ',';
    if (!std::isnan(r.ratio)) os << io::csv_number(r.ratio);
    os << '\n';
  }
  return os.str();
}

}  // namespace pobs
