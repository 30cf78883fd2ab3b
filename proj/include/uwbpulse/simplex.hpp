#pragma once

#include <Eigen/Dense>

namespace uwbpulse {

// max c'x subject to A x <= b with x free, solved through its dual
//   min b'y  s.t.  A'y = c, y >= 0
// by a two-phase revised simplex method. Dantzig pricing with lowest-index
// tie-breaking; Bland's rule after a run of degenerate pivots.
struct SimplexOptions {
  int max_iterations = 20000;
  int degenerate_switch = 50;
  double tolerance = 1e-11;
};

struct SimplexResult {
  enum class Status { optimal, infeasible, unbounded, iteration_limit };
  Status status = Status::iteration_limit;
  Eigen::VectorXd x;  // primal maximizer (simplex multipliers of the dual)
  Eigen::VectorXd y;  // dual solution, one entry per constraint row
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
};

SimplexResult solve_inequality_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                                  const SimplexOptions& opt = {});

}  // namespace uwbpulse
