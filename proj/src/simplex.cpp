#include "uwbpulse/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace uwbpulse {

namespace {

class DualSimplex {
 public:
  DualSimplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c, const SimplexOptions& opt)
      : A_(A), b_(b), c_(c), opt_(opt), m_(static_cast<int>(c.size())), n_(static_cast<int>(A.rows())) {
    sign_.resize(m_);
    for (int i = 0; i < m_; ++i) sign_(i) = c_(i) < 0.0 ? -1.0 : 1.0;
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
  }

  SimplexResult run() {
    SimplexResult res;
    // Phase I: minimize the sum of artificials.
    auto st = iterate(true, res.iterations);
    if (st == SimplexResult::Status::iteration_limit) return finish(res, st);
    refactor();
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= n_) infeas += xB_(i);
    if (infeas > 1e-9 * (1.0 + c_.lpNorm<Eigen::Infinity>())) {
      // Dual infeasible: the primal is unbounded or infeasible.
      return finish(res, SimplexResult::Status::unbounded);
    }
    drive_out_artificials();
    st = iterate(false, res.iterations);
    return finish(res, st);
  }

 private:
  Eigen::VectorXd column(int j) const {
    if (j < n_) return A_.row(j).transpose();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    e(j - n_) = sign_(j - n_);
    return e;
  }

  double cost(int j, bool phase1) const {
    if (phase1) return j >= n_ ? 1.0 : 0.0;
    return j >= n_ ? 0.0 : b_(j);
  }

  void refactor() {
    Eigen::MatrixXd B(m_, m_);
    for (int i = 0; i < m_; ++i) B.col(i) = column(basis_[i]);
    lu_.compute(B);
    luT_.compute(B.transpose());
    xB_ = lu_.solve(c_);
  }

  SimplexResult::Status iterate(bool phase1, int& iterations) {
    std::vector<char> in_basis(static_cast<std::size_t>(n_ + m_), 0);
    for (int j : basis_) in_basis[static_cast<std::size_t>(j)] = 1;
    int degenerate_run = 0;
    const double ctol = opt_.tolerance * (1.0 + b_.lpNorm<Eigen::Infinity>());
    while (iterations < opt_.max_iterations) {
      refactor();
      Eigen::VectorXd cB(m_);
      for (int i = 0; i < m_; ++i) cB(i) = cost(basis_[i], phase1);
      const Eigen::VectorXd pi = luT_.solve(cB);
      const Eigen::VectorXd red = A_ * pi;  // a_j' pi for the structural columns
      const bool bland = degenerate_run >= opt_.degenerate_switch;
      int enter = -1;
      double best = -ctol;
      for (int j = 0; j < n_; ++j) {
        if (in_basis[static_cast<std::size_t>(j)]) continue;
        const double d = cost(j, phase1) - red(j);
        if (bland) {
          if (d < -ctol) {
            enter = j;
            break;
          }
        } else if (d < best) {
          best = d;
          enter = j;
        }
      }
      if (enter < 0) return SimplexResult::Status::optimal;
      const Eigen::VectorXd w = lu_.solve(column(enter));
      int leave = -1;
      double theta = std::numeric_limits<double>::infinity();
      const double wtol = 1e-12 * (1.0 + w.lpNorm<Eigen::Infinity>());
      for (int i = 0; i < m_; ++i) {
        if (w(i) <= wtol) continue;
        const double ratio = std::max(xB_(i), 0.0) / w(i);
        if (leave < 0 || ratio < theta - 1e-15 * (1.0 + theta) ||
            (std::abs(ratio - theta) <= 1e-15 * (1.0 + theta) && basis_[i] < basis_[leave])) {
          theta = ratio;
          leave = i;
        }
      }
      if (leave < 0) return SimplexResult::Status::infeasible;  // dual unbounded
      degenerate_run = theta <= 1e-14 ? degenerate_run + 1 : 0;
      in_basis[static_cast<std::size_t>(basis_[leave])] = 0;
      in_basis[static_cast<std::size_t>(enter)] = 1;
      basis_[leave] = enter;
      ++iterations;
    }
    return SimplexResult::Status::iteration_limit;
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      refactor();
      // Row i of B^{-1} A'
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(m_);
      ei(i) = 1.0;
      const Eigen::VectorXd row = luT_.solve(ei);
      const Eigen::VectorXd alpha = A_ * row;
      std::vector<char> in_basis(static_cast<std::size_t>(n_), 0);
      for (int j : basis_)
        if (j < n_) in_basis[static_cast<std::size_t>(j)] = 1;
      int pick = -1;
      double big = 1e-9;
      for (int j = 0; j < n_; ++j) {
        if (in_basis[static_cast<std::size_t>(j)]) continue;
        if (std::abs(alpha(j)) > big) {
          big = std::abs(alpha(j));
          pick = j;
        }
      }
      if (pick >= 0) basis_[i] = pick;
    }
  }

  SimplexResult finish(SimplexResult& res, SimplexResult::Status st) {
    res.status = st;
    refactor();
    Eigen::VectorXd cB(m_);
    for (int i = 0; i < m_; ++i) cB(i) = cost(basis_[i], false);
    res.x = luT_.solve(cB);
    res.y = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.y(basis_[i]) = std::max(xB_(i), 0.0);
    res.primal_objective = c_.dot(res.x);
    res.dual_objective = b_.dot(res.y);
    return res;
  }

  const Eigen::MatrixXd& A_;
  const Eigen::VectorXd& b_;
  const Eigen::VectorXd& c_;
  SimplexOptions opt_;
  int m_;
  int n_;
  Eigen::VectorXd sign_;
  std::vector<int> basis_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_, luT_;
  Eigen::VectorXd xB_;
};

}  // namespace

SimplexResult solve_inequality_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                                  const SimplexOptions& opt) {
  DualSimplex s(A, b, c, opt);
  return s.run();
}

}  // namespace uwbpulse
