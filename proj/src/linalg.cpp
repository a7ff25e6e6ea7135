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

#include "mmwsn/linalg.hpp"

#include <cmath>
#include <limits>

namespace mmwsn
{

cmat pinv(const cmat &A, double tol)
{
    if (A.size() == 0)
        return cmat::Zero(A.cols(), A.rows());
    Eigen::JacobiSVD<cmat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const rvec &s = svd.singularValues();
    const double cut = tol * (s.size() ? s(0) : 0.0);
    cmat out = cmat::Zero(A.cols(), A.rows());
    for (Eigen::Index i = 0; i < s.size(); ++i)
    {
        if (s(i) <= cut || s(i) == 0.0)
            break;
        out.noalias() += svd.matrixV().col(i) * (1.0 / s(i)) * svd.matrixU().col(i).adjoint();
    }
    return out;
}

int numerical_rank(const cmat &A, double tol)
{
    if (A.size() == 0)
        return 0;
    Eigen::JacobiSVD<cmat> svd(A);
    const rvec &s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0) && s(i) > 0.0)
            ++r;
    return r;
}

cmat block_diagonal(const std::vector<cmat> &blocks)
{
    Eigen::Index rows = 0, cols = 0;
    for (const auto &b : blocks)
    {
        rows += b.rows();
        cols += b.cols();
    }
    cmat out = cmat::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto &b : blocks)
    {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

cmat hermitian_sqrt(const cmat &R)
{
    Eigen::SelfAdjointEigenSolver<cmat> eig(hermitian_part(R));
    rvec d = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const cmat &V = eig.eigenvectors();
    return V * d.cast<cx>().asDiagonal() * V.adjoint();
}

double projection_residual(const cmat &A, const cmat &X)
{
    const double nx = X.norm();
    if (nx == 0.0)
        return 0.0;
    // orthonormal basis of span(A) from a rank-revealing QR
    Eigen::ColPivHouseholderQR<cmat> qr(A);
    qr.setThreshold(1e-12);
    const auto r = qr.rank();
    cmat Q = qr.householderQ() * cmat::Identity(A.rows(), r);
    cmat res = X - Q * (Q.adjoint() * X);
    return res.norm() / nx;
}

cmat hermitian_part(const cmat &A) { return 0.5 * (A + A.adjoint()); }

double real_trace(const cmat &A) { return A.trace().real(); }

double condition_number(const cmat &A)
{
    Eigen::JacobiSVD<cmat> svd(A);
    const rvec &s = svd.singularValues();
    if (s.size() == 0)
        return 1.0;
    const double lo = s(s.size() - 1);
    if (lo <= 0.0)
        return std::numeric_limits<double>::infinity();
    return s(0) / lo;
}

double pairwise_sum(const double *xs, std::size_t n)
{
    if (n <= 8)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += xs[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(xs, h) + pairwise_sum(xs + h, n - h);
}

double pairwise_sum(const std::vector<double> &xs) { return pairwise_sum(xs.data(), xs.size()); }

} // namespace mmwsn
