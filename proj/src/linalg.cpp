#include "uwbpulse/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "uwbpulse/errors.hpp"
#include "uwbpulse/simd.hpp"

namespace uwbpulse {

namespace {

double off_norm2(const Eigen::MatrixXd& A) {
  double s = 0.0;
  for (long j = 0; j < A.cols(); ++j)
    for (long i = 0; i < A.rows(); ++i)
      if (i != j) s += A(i, j) * A(i, j);
  return s;
}

std::span<double> col(Eigen::MatrixXd& A, long j) { return {A.data() + j * A.rows(), static_cast<std::size_t>(A.rows())}; }

}  // namespace

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, int max_sweeps) {
  if (input.rows() != input.cols()) throw ConfigError("jacobi: matrix is not square");
  const long n = input.rows();
  Eigen::MatrixXd A = 0.5 * (input + input.transpose());
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  const double total = A.squaredNorm();
  SymmetricEigen out;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double off = off_norm2(A);
    if (off <= 1e-32 * total || off == 0.0) break;
    ++out.sweeps;
    for (long p = 0; p < n - 1; ++p) {
      for (long q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = A(p, p), aqq = A(q, q);
        if (std::abs(apq) < 1e-18 * std::sqrt(std::abs(app * aqq))) {
          A(p, q) = A(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        simd::rotate(col(A, p), col(A, q), c, s);
        A(p, p) = app - t * apq;
        A(q, q) = aqq + t * apq;
        A(p, q) = A(q, p) = 0.0;
        for (long r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          A(p, r) = A(r, p);
          A(q, r) = A(r, q);
        }
        simd::rotate(col(V, p), col(V, q), c, s);
      }
    }
  }
  std::vector<long> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0L);
  std::stable_sort(idx.begin(), idx.end(), [&](long a, long b) { return A(a, a) < A(b, b); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (long k = 0; k < n; ++k) {
    out.values(k) = A(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = V.col(idx[static_cast<std::size_t>(k)]);
  }
  return out;
}

Eigen::MatrixXd inv_sqrt_spd(const Eigen::MatrixXd& G, double min_eig) {
  const auto es = jacobi_eigen(G);
  if (!(es.values(0) > min_eig))
    throw UnstableError("Gram matrix near-singular (smallest eigenvalue " + std::to_string(es.values(0)) +
                        "): Riesz lower bound is about zero, shift too small or pulse degenerate");
  const Eigen::VectorXd d = es.values.array().rsqrt();
  Eigen::MatrixXd S = es.vectors * d.asDiagonal() * es.vectors.transpose();
  return 0.5 * (S + S.transpose());
}

Eigen::MatrixXd sqrt_spd(const Eigen::MatrixXd& G) {
  const auto es = jacobi_eigen(G);
  if (es.values(0) < 0.0) throw UnstableError("matrix square root of an indefinite matrix");
  const Eigen::VectorXd d = es.values.array().sqrt();
  Eigen::MatrixXd S = es.vectors * d.asDiagonal() * es.vectors.transpose();
  return 0.5 * (S + S.transpose());
}

double weak_norm(const Eigen::MatrixXd& X) { return X.norm() / std::sqrt(static_cast<double>(X.rows())); }

}  // namespace uwbpulse
