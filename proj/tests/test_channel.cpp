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

#include <numbers>
#include <thread>

using namespace mmwsn;
using testing::small_config;

TEST_CASE("array response")
{
    const cvec broadside = array_response(4, std::numbers::pi / 2, 0.5);
    for (int i = 0; i < 4; ++i)
    {
        CHECK(std::abs(broadside(i) - cx(0.5, 0.0)) < 1e-15);
    }
    const cvec endfire = array_response(4, 0.0, 0.5);
    const double expect[] = {0.5, -0.5, 0.5, -0.5};
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(endfire(i) - cx(expect[i], 0.0)) < 1e-15);

    Rng rng(8);
    std::uniform_real_distribution<double> ang(0.0, std::numbers::pi);
    for (int t = 0; t < 50; ++t)
    {
        const int n = 1 + t % 17;
        const cvec a = array_response(n, ang(rng), 0.5);
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(std::abs(a(i)) - 1.0 / std::sqrt(n)) < 1e-15);
        CHECK(std::abs(a.norm() - 1.0) < 1e-14);
    }
}

TEST_CASE("channel structure")
{
    const WsnConfig cfg = small_config();
    Rng rng(21);
    const ChannelRealization ch = generate_channel(cfg, rng);
    CHECK(ch.num_sensors() == 4);
    CHECK(ch.G.rows() == 8);
    CHECK(ch.G.cols() == 32);
    CHECK(ch.A_R.cols() == cfg.num_paths);
    CHECK_FALSE(ch.independent_aoa());

    const double scale = std::sqrt(8.0 * 8.0 / 4.0);
    for (int k = 0; k < 4; ++k)
    {
        CHECK(testing::rel(ch.A_R * ch.D[k] * ch.A_T[k].adjoint(), ch.G_k[k]) <= 1e-12);
        CHECK(ch.G.middleCols(8 * k, 8) == ch.G_k[k]);
        CHECK(ch.A_R_k[k] == ch.A_R);
        for (int n = 0; n < 4; ++n)
        {
            CHECK(std::abs(ch.D[k](n, n) - scale * ch.alpha(n, k)) < 1e-14);
            CHECK(std::abs(ch.A_T[k].col(n).norm() - 1.0) < 1e-14);
            CHECK((ch.A_T[k].col(n).cwiseAbs().array() - 1.0 / std::sqrt(8.0)).abs().maxCoeff() < 1e-15);
        }
        CHECK((ch.D[k] - cmat(ch.D[k].diagonal().asDiagonal())).norm() == 0.0);
    }
    for (int n = 0; n < 4; ++n)
        CHECK((ch.A_R.col(n).cwiseAbs().array() - 1.0 / std::sqrt(8.0)).abs().maxCoeff() < 1e-15);
    CHECK((ch.aoa.array() >= 0.0).all());
    CHECK((ch.aoa.array() <= std::numbers::pi).all());
    CHECK((ch.aod.array() >= 0.0).all());
    CHECK((ch.aod.array() <= std::numbers::pi).all());
    CHECK(numerical_rank(ch.G) <= cfg.num_paths);
}

TEST_CASE("single path gives rank-one channels")
{
    WsnConfig cfg = small_config();
    cfg.num_paths = 1;
    cfg.param_dim = 1;
    cfg.rf_chains_sensor = 1;
    cfg.rf_chains_fc = 1;
    Rng rng(5);
    const ChannelRealization ch = generate_channel(cfg, rng);
    for (const auto &Gk : ch.G_k)
        CHECK(numerical_rank(Gk) == 1);
    CHECK(numerical_rank(ch.G) == 1);
}

TEST_CASE("mean channel energy")
{
    const WsnConfig cfg = small_config();
    Rng rng(77);
    const int n = 10000;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        s += generate_channel(cfg, rng).G_k[0].squaredNorm();
    CHECK(testing::rel(s / n, 64.0) < 0.03);
}

TEST_CASE("subspace chain of the channel")
{
    const WsnConfig cfg = WsnConfig::reference();
    Rng rng(3);
    for (int t = 0; t < 5; ++t)
    {
        const ChannelRealization ch = generate_channel(cfg, rng);
        for (int k = 0; k < ch.num_sensors(); ++k)
            CHECK(transmit_subspace_residual(ch, k) <= 1e-10);
        CHECK(receive_subspace_residual(ch) <= 1e-10);
    }
}

TEST_CASE("independent arrivals")
{
    WsnConfig cfg = small_config();
    cfg.independent_aoa = true;
    Rng rng(4);
    const ChannelRealization ch = generate_channel(cfg, rng);
    CHECK(ch.independent_aoa());
    CHECK(ch.aoa.cols() == 4);
    CHECK(ch.A_R.cols() == 16);
    for (int k = 0; k < 4; ++k)
    {
        CHECK(testing::rel(ch.A_R_k[k] * ch.D[k] * ch.A_T[k].adjoint(), ch.G_k[k]) <= 1e-12);
        CHECK(ch.A_R.middleCols(4 * k, 4) == ch.A_R_k[k]);
    }
    CHECK(receive_subspace_residual(ch) <= 1e-10);
}

TEST_CASE("channel generation is deterministic and replayable")
{
    const WsnConfig cfg = small_config();
    Rng a(9), b(9);
    const ChannelRealization c1 = generate_channel(cfg, a);
    const ChannelRealization c2 = generate_channel(cfg, b);
    CHECK(c1.G == c2.G);

    const ChannelRealization c3 = channel_from_json(channel_to_json(c1, cfg), cfg);
    CHECK(c3.G == c1.G);
    CHECK(c3.alpha == c1.alpha);
    CHECK(c3.aod == c1.aod);

    WsnConfig other = cfg;
    other.rx_antennas = 6;
    CHECK_THROWS_AS(channel_from_json(channel_to_json(c1, cfg), other), ConfigError);
    CHECK_THROWS_AS(channel_from_json("{not json", cfg), ConfigError);
}

TEST_CASE("cached spectrum is shared by concurrent readers")
{
    const WsnConfig cfg = WsnConfig::reference();
    Rng rng(12);
    const ChannelRealization ch = generate_channel(cfg, rng);
    std::vector<const ChannelSpectrum *> seen(4);
    std::vector<std::thread> pool;
    for (int i = 0; i < 4; ++i)
        pool.emplace_back([&, i] { seen[i] = &ch.spectrum(); });
    for (auto &t : pool)
        t.join();
    for (int i = 1; i < 4; ++i)
        CHECK(seen[i] == seen[0]);
    const ChannelSpectrum &s = ch.spectrum();
    CHECK(s.rank <= cfg.num_paths);
    CHECK(testing::rel(s.U * s.singular.cast<cx>().asDiagonal() * s.V.adjoint(), ch.G) < 1e-12);
}

TEST_CASE("decomposition")
{
    const WsnConfig cfg = small_config();
    Rng rng(31);
    const ChannelRealization ch = generate_channel(cfg, rng);
    const MeasurementModel model = build_measurement_model(cfg, rng);
    const ChannelDecomposition d = decompose(ch, model);

    for (Eigen::Index i = 1; i < d.lambda_g.size(); ++i)
        CHECK(d.lambda_g(i) <= d.lambda_g(i - 1));
    CHECK((d.lambda_g.array() >= 0.0).all());
    int positive = 0;
    for (Eigen::Index i = 0; i < d.lambda_g.size(); ++i)
        positive += d.lambda_g(i) > 1e-12 * d.lambda_g(0);
    CHECK(positive <= cfg.num_paths);

    CHECK((d.V_g.adjoint() * d.V_g - cmat::Identity(d.V_g.cols(), d.V_g.cols())).norm() < 1e-12);
    CHECK((d.U_M.adjoint() * d.U_M - cmat::Identity(2, 2)).norm() < 1e-12);
    CHECK(((d.sigma_M.array().square() - d.lambda_M.array()).abs() < 1e-14).all());

    // eigenvalues of M^H M from a different solver
    Eigen::SelfAdjointEigenSolver<cmat> eig(model.stacked.adjoint() * model.stacked);
    const rvec ev = testing::sorted_desc(eig.eigenvalues());
    for (int l = 0; l < 2; ++l)
        CHECK(std::abs(ev(l) - d.lambda_M(l)) <= 1e-10 * std::max(1.0, ev(0)));

    // eigenvalues of G^H G (the nonzero part) from the same independent solver
    Eigen::SelfAdjointEigenSolver<cmat> eg(ch.G * ch.G.adjoint());
    const rvec gv = testing::sorted_desc(eg.eigenvalues());
    for (int l = 0; l < cfg.num_paths; ++l)
        CHECK(std::abs(gv(l) - d.lambda_g(l)) <= 1e-10 * gv(0));

    // block slices restack to the factors
    cmat V(d.V_g1.rows(), 2), U(d.U_M.rows(), 2);
    for (int k = 0; k < 4; ++k)
    {
        V.middleRows(8 * k, 8) = d.V_g1_k[k];
        U.middleRows(model.offsets[k], 2) = d.U_M_k[k];
    }
    CHECK(V == d.V_g1);
    CHECK(U == d.U_M);
    CHECK(d.V_g1 == d.V_g.leftCols(2));
}

TEST_CASE("identity channel stub")
{
    ChannelSpectrum s = spectrum_of(cmat::Identity(4, 4));
    CHECK(((s.singular.array() - 1.0).abs() < 1e-15).all());
    CHECK((s.V.adjoint() * s.V - cmat::Identity(4, 4)).norm() < 1e-14);
    CHECK(s.rank == 4);
    const MeasurementModel model = make_measurement_model({cmat::Identity(2, 2), cmat::Identity(2, 2)}, 0.1);
    const ChannelDecomposition d = decompose(s, 2, model);
    CHECK(((d.lambda_g.array() - 1.0).abs() < 1e-15).all());
}

TEST_CASE("rank-deficient channel is rejected")
{
    cmat G = cmat::Zero(4, 4);
    G(0, 0) = 1.0;
    const MeasurementModel model = make_measurement_model({cmat::Identity(2, 2), cmat::Identity(2, 2)}, 0.1);
    CHECK_THROWS_AS(decompose(spectrum_of(G), 2, model), DegenerateChannel);
}
