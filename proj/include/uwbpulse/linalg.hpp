#pragma once

#include <Eigen/Dense>

namespace uwbpulse {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
  int sweeps = 0;
};

// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& A, int max_sweeps = 60);

// Canonical inverse square root; UnstableError if the smallest eigenvalue is <= min_eig.
Eigen::MatrixXd inv_sqrt_spd(const Eigen::MatrixXd& G, double min_eig = 1e-12);
Eigen::MatrixXd sqrt_spd(const Eigen::MatrixXd& G);

// ||X||_F / sqrt(N)
double weak_norm(const Eigen::MatrixXd& X);

}  // namespace uwbpulse
