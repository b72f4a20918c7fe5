// Copyright 2026 The DDPPM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ddppm/linalg.h"

#include <cmath>

namespace ddppm {

SymmetricEigen EigenDescending(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigendecomposition failed");
  }
  SymmetricEigen out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

double SpectralNorm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

Matrix MatrixPower(const Matrix& a, int power) {
  if (a.rows() != a.cols()) throw InvalidArgument("matrix power of non-square");
  if (power < 0) throw InvalidArgument("negative matrix power");
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix base = a;
  while (power > 0) {
    if (power & 1) result = result * base;
    power >>= 1;
    if (power > 0) base = base * base;
  }
  return result;
}

Matrix TopLeftSingularVectors(const Matrix& x, Index r) {
  if (r < 1 || r > std::min(x.rows(), x.cols())) {
    throw InvalidArgument("rank " + std::to_string(r) +
                          " outside [1, min(n, d)]");
  }
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU);
  Matrix u = svd.matrixU().leftCols(r);
  CanonicalizeSigns(u);
  return u;
}

void CanonicalizeSigns(Matrix& columns) {
  for (Index j = 0; j < columns.cols(); ++j) {
    Index arg = 0;
    columns.col(j).cwiseAbs().maxCoeff(&arg);
    if (columns(arg, j) < 0) columns.col(j) *= -1.0;
  }
}

bool IsSymmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace ddppm
