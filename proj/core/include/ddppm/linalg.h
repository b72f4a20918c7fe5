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

#ifndef DDPPM_CORE_LINALG_H_
#define DDPPM_CORE_LINALG_H_

#include "ddppm/common.h"

namespace ddppm {

// Eigen-decomposition of a symmetric matrix with eigenvalues sorted in
// descending order and eigenvectors as the matching columns.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

SymmetricEigen EigenDescending(const Matrix& symmetric);

// Largest singular value. For symmetric input this is the largest
// eigenvalue modulus.
double SpectralNorm(const Matrix& a);

// a^power by repeated squaring; power >= 0.
Matrix MatrixPower(const Matrix& a, int power);

// Top-r eigenvectors of x x^T (equivalently left singular vectors of x),
// columns unit norm with the largest-magnitude entry made positive.
Matrix TopLeftSingularVectors(const Matrix& x, Index r);

// Flips each column so that its largest-magnitude entry is positive.
void CanonicalizeSigns(Matrix& columns);

bool IsSymmetric(const Matrix& a, double tol);

}  // namespace ddppm

#endif  // DDPPM_CORE_LINALG_H_
