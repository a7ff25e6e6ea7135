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

#include "helpers.hpp"

#include "mmwsn/linalg.hpp"

#include <doctest.h>

using namespace mmwsn;

TEST_CASE("pseudo-inverse satisfies the Penrose conditions")
{
    Rng rng(1);
    for (auto [r, c, rank] : {std::tuple{5, 3, 3}, std::tuple{3, 5, 3}, std::tuple{6, 6, 2}})
    {
        const cmat A = complex_gaussian(rng, r, rank) * complex_gaussian(rng, rank, c);
        const cmat X = pinv(A);
        CHECK((A * X * A - A).norm() < 1e-10 * A.norm());
        CHECK((X * A * X - X).norm() < 1e-10 * X.norm());
        CHECK(((A * X).adjoint() - A * X).norm() < 1e-10);
        CHECK(((X * A).adjoint() - X * A).norm() < 1e-10);
        CHECK(numerical_rank(A) == rank);
    }
    CHECK(pinv(cmat::Zero(3, 2)).norm() == 0.0);
}

TEST_CASE("block diagonal")
{
    cmat a = cmat::Constant(2, 1, cx(1, 2));
    cmat b = cmat::Constant(1, 3, cx(3, 0));
    const cmat D = block_diagonal({a, b});
    CHECK(D.rows() == 3);
    CHECK(D.cols() == 4);
    CHECK(D.block(0, 0, 2, 1) == a);
    CHECK(D.block(2, 1, 1, 3) == b);
    CHECK(D.block(0, 1, 2, 3).norm() == 0.0);
    CHECK(D.block(2, 0, 1, 1).norm() == 0.0);
}

TEST_CASE("hermitian square root")
{
    Rng rng(2);
    const cmat B = complex_gaussian(rng, 5, 5);
    const cmat R = B * B.adjoint() + cmat::Identity(5, 5);
    const cmat S = hermitian_sqrt(R);
    CHECK((S * S - R).norm() < 1e-12 * R.norm());
    CHECK((S - S.adjoint()).norm() < 1e-12 * S.norm());
}

TEST_CASE("projection residual")
{
    Rng rng(3);
    const cmat A = complex_gaussian(rng, 6, 2);
    CHECK(projection_residual(A, A * complex_gaussian(rng, 2, 4)) < 1e-13);
    const cmat X = complex_gaussian(rng, 6, 3);
    const double r = projection_residual(A, X);
    CHECK(r > 0.1);
    CHECK(r <= 1.0);
    CHECK(projection_residual(A, cmat::Zero(6, 2)) == 0.0);
}

TEST_CASE("pairwise summation")
{
    std::vector<double> xs;
    for (int i = 1; i <= 1000; ++i)
        xs.push_back(1.0 / i);
    double naive = 0.0;
    for (double x : xs)
        naive += x;
    CHECK(pairwise_sum(xs) == doctest::Approx(naive).epsilon(1e-14));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}
