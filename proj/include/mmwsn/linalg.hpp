// SPDX-License-Identifier: Apache-2.0
//
// mmwsn: hybrid transceiver design for mmWave sensor-network estimation
// Copyright (C) 2026 The mmwsn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMWSN_LINALG_HPP
#define MMWSN_LINALG_HPP

#include "mmwsn/types.hpp"

#include <vector>

namespace mmwsn
{

// Relative singular-value cutoff used by every pseudo-inverse in the library.
inline constexpr double pinv_tolerance = 1e-12;

// Moore-Penrose inverse via thin SVD; singular values below tol * sigma_max are dropped.
cmat pinv(const cmat &A, double tol = pinv_tolerance);

// Numerical rank with the same cutoff as pinv.
int numerical_rank(const cmat &A, double tol = pinv_tolerance);

cmat block_diagonal(const std::vector<cmat> &blocks);

// Principal square root of a Hermitian PSD matrix (negative eigenvalues clamped to 0).
cmat hermitian_sqrt(const cmat &R);

// ||X - P_A X||_F / ||X||_F where P_A projects onto span(A). Zero for X = 0.
double projection_residual(const cmat &A, const cmat &X);

// Symmetrized copy, (A + A^H)/2.
cmat hermitian_part(const cmat &A);

// Real part of the trace; the imaginary residue is discarded.
double real_trace(const cmat &A);

// 2-norm condition number; infinity for rank-deficient input.
double condition_number(const cmat &A);

// Pairwise (cascade) summation: result does not depend on anything but the order of xs.
double pairwise_sum(const double *xs, std::size_t n);
double pairwise_sum(const std::vector<double> &xs);

} // namespace mmwsn

#endif
