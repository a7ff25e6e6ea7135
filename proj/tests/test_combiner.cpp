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

#include "mmwsn/combiner.hpp"
#include "mmwsn/harness.hpp"
#include "mmwsn/linalg.hpp"
#include "mmwsn/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace mmwsn;
using testing::rel;
using testing::small_config;

namespace
{

struct Scene
{
    WsnConfig cfg;
    Realization r;
    std::vector<cmat> F_k;
    cmat F;
};

// Hybrid-total precoders on one realization, the designs the combiner sees in practice.
Scene scene(const WsnConfig &cfg, std::uint64_t seed)
{
    Scene s{cfg, draw_realization(cfg, seed), {}, {}};
    const DesignOutcome d = evaluate_design(Design::HybridTotal, s.r, cfg);
    s.F_k = d.F_k;
    s.F = d.F;
    return s;
}

double spectral_norm(const cmat &A) { return Eigen::JacobiSVD<cmat>(A).singularValues()(0); }

} // namespace

TEST_CASE("scalar Wiener gain")
{
    const cmat alpha = cmat::Ones(1, 1);
    const rmat aoa = rmat::Constant(1, 1, 1.0), aod = rmat::Constant(1, 1, 1.0);
    const ChannelRealization ch = channel_from_parameters(alpha, aoa, aod, 1, 1, 0.5);
    REQUIRE(std::abs(ch.G(0, 0) - 1.0) <= 1e-15);
    const MeasurementModel model = make_measurement_model({cmat::Ones(1, 1)}, 0.0);
    const cmat W = lmmse_combiner(ch, cmat::Ones(1, 1), model, 1.0);
    CHECK(std::abs(W(0, 0) - 0.5) <= 1e-15);
}

TEST_CASE("both algebraic forms of the LMMSE combiner agree")
{
    for (ObservationMode obs : {ObservationMode::Noisy, ObservationMode::Noiseless})
        for (std::uint64_t seed = 1; seed <= 20; ++seed)
        {
            const Scene s = scene(small_config(obs), seed);
            const double v2 = s.cfg.fc_noise_var;
            CHECK(rel(lmmse_combiner(s.r.channel, s.F, s.r.model, v2),
                      lmmse_combiner_pushthrough(s.r.channel, s.F, s.r.model, v2)) <= 1e-9);
        }
}

TEST_CASE("zero precoder: noise-only covariance and zero combiner")
{
    const Scene s = scene(small_config(), 3);
    const cmat Z = cmat::Zero(s.F.rows(), s.F.cols());
    const double v2 = 0.3;
    CHECK((received_covariance(s.r.channel, Z, s.r.model, v2) - v2 * cmat::Identity(8, 8)).norm() == 0.0);
    const cmat W = lmmse_combiner(s.r.channel, Z, s.r.model, v2);
    CHECK(W.norm() == 0.0);
    Rng rng(1);
    CHECK(estimate(W, complex_gaussian(rng, 8, 1)).norm() == 0.0);
}

TEST_CASE("received covariance is Hermitian and bounded below by the receiver noise")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        const Scene s = scene(small_config(), seed);
        const double v2 = s.cfg.fc_noise_var;
        const cmat R = received_covariance(s.r.channel, s.F, s.r.model, v2);
        CHECK((R - R.adjoint()).norm() <= 1e-12 * R.norm());
        const double lo = Eigen::SelfAdjointEigenSolver<cmat>(R).eigenvalues().minCoeff();
        CHECK(lo >= v2 * (1 - 1e-10));
    }
}

TEST_CASE("received covariance matches the sample covariance of simulated signals")
{
    const Scene s = scene(small_config(), 4);
    const double v2 = s.cfg.fc_noise_var;
    const cmat R = received_covariance(s.r.channel, s.F, s.r.model, v2);
    Rng rng(99);
    const int n = 100000;
    cmat S = cmat::Zero(8, 8);
    for (int i = 0; i < n; ++i)
    {
        const cvec theta = sample_parameter(s.r.model, rng);
        const cvec y = receive_signal(s.r.channel, s.F_k, sense(s.r.model, theta, rng), v2, rng);
        S += y * y.adjoint();
    }
    S /= n;
    CHECK(spectral_norm(S - R) <= 0.02 * spectral_norm(R));
}

TEST_CASE("orthogonality principle for the digital combiner")
{
    for (ObservationMode obs : {ObservationMode::Noisy, ObservationMode::Noiseless})
        for (std::uint64_t seed = 1; seed <= 20; ++seed)
        {
            const Scene s = scene(small_config(obs), seed);
            const double v2 = s.cfg.fc_noise_var;
            const cmat R = received_covariance(s.r.channel, s.F, s.r.model, v2);
            const cmat W = lmmse_combiner(s.r.channel, s.F, s.r.model, v2);
            const cmat cross = (s.r.channel.G * s.F * s.r.model.stacked).adjoint();
            CHECK((W.adjoint() * R - cross).norm() <= 1e-9 * cross.norm());
        }
}

TEST_CASE("digital combiner lies in the span of the receive dictionary")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        const Scene s = scene(small_config(), seed);
        const cmat W = lmmse_combiner(s.r.channel, s.F, s.r.model, s.cfg.fc_noise_var);
        CHECK(projection_residual(s.r.channel.A_R, W) <= 1e-8);
    }
}

TEST_CASE("hybrid combiner: dictionary atoms, full budget exactness, MSE ordering")
{
    for (ObservationMode obs : {ObservationMode::Noisy, ObservationMode::Noiseless})
        for (std::uint64_t seed = 1; seed <= 20; ++seed)
        {
            const Scene s = scene(small_config(obs), seed);
            const double v2 = s.cfg.fc_noise_var;
            const CombinerSet c = design_combiner(s.r.channel, s.F, s.r.model, v2, s.cfg.rf_chains_fc);
            for (std::size_t i = 0; i < c.selected.size(); ++i)
            {
                CHECK(c.W_RF.col(static_cast<Eigen::Index>(i)) == s.r.channel.A_R.col(c.selected[i]));
                CHECK((c.W_RF.col(static_cast<Eigen::Index>(i)).cwiseAbs().array() - 1 / std::sqrt(8.0)).abs().maxCoeff() <= 1e-15);
            }
            const double md = mse_of_linear_transceiver(s.r.channel, s.F, c.W, s.r.model, v2);
            const double mh = mse_of_linear_transceiver(s.r.channel, s.F, c.hybrid(), s.r.model, v2);
            CHECK(mh >= md - 1e-9);

            const CombinerSet full = design_combiner(s.r.channel, s.F, s.r.model, v2, s.cfg.num_paths);
            if (full.rank_collapsed)
                continue;
            const cmat root = hermitian_sqrt(full.R_yy);
            CHECK((root * (full.W - full.hybrid())).norm() <= 1e-8 * (root * full.W).norm());
        }
}

TEST_CASE("identity weight reduces to plain SOMP")
{
    const Scene s = scene(small_config(), 6);
    const cmat W = lmmse_combiner(s.r.channel, s.F, s.r.model, s.cfg.fc_noise_var);
    const HybridCombiner h = hybrid_combiner(W, cmat::Identity(8, 8), s.r.channel.A_R, 3);
    const SompResult p = somp_decompose(W, s.r.channel.A_R, 3);
    CHECK(h.selected == p.selected);
    CHECK(rel(h.W_BB, p.coefficients) <= 1e-10);
}

TEST_CASE("weighted baseband solves the normal equations")
{
    const Scene s = scene(small_config(), 8);
    const double v2 = s.cfg.fc_noise_var;
    const cmat R = received_covariance(s.r.channel, s.F, s.r.model, v2);
    const cmat W = lmmse_combiner(s.r.channel, s.F, s.r.model, v2);
    const cmat W_RF = s.r.channel.A_R.leftCols(2);
    const cmat X = weighted_baseband(W_RF, R, W);
    const cmat ref = (W_RF.adjoint() * R * W_RF).inverse() * W_RF.adjoint() * R * W;
    CHECK(rel(X, ref) <= 1e-8);
}

TEST_CASE("estimation error minus weighted fit error is candidate independent")
{
    Rng rng(17);
    for (ObservationMode obs : {ObservationMode::Noisy, ObservationMode::Noiseless})
        for (std::uint64_t seed = 1; seed <= 5; ++seed)
        {
            const Scene s = scene(small_config(obs), seed);
            const double v2 = s.cfg.fc_noise_var;
            const cmat R = received_covariance(s.r.channel, s.F, s.r.model, v2);
            const cmat root = hermitian_sqrt(R);
            const cmat W = lmmse_combiner(s.r.channel, s.F, s.r.model, v2);
            const double expected = s.r.model.param_dim() - real_trace(W.adjoint() * R * W);
            std::vector<double> offs;
            for (int c = 0; c < 10; ++c)
            {
                std::vector<int> idx(s.cfg.num_paths);
                std::iota(idx.begin(), idx.end(), 0);
                std::shuffle(idx.begin(), idx.end(), rng);
                cmat W_RF(8, s.cfg.rf_chains_fc);
                for (int i = 0; i < s.cfg.rf_chains_fc; ++i)
                    W_RF.col(i) = s.r.channel.A_R.col(idx[i]);
                const cmat W_BB = complex_gaussian(rng, s.cfg.rf_chains_fc, 2);
                const cmat Wh = W_RF * W_BB;
                const double mse = mse_of_linear_transceiver(s.r.channel, s.F, Wh, s.r.model, v2);
                offs.push_back(mse - (root * (W - Wh)).squaredNorm());
            }
            const auto [lo, hi] = std::minmax_element(offs.begin(), offs.end());
            CHECK(*hi - *lo <= 1e-8 * std::max(1.0, std::abs(expected)));
            CHECK(std::abs(offs.front() - expected) <= 1e-8 * std::max(1.0, std::abs(expected)));
        }
}

TEST_CASE("hybrid estimate equals the digital one when the stages multiply out")
{
    Rng rng(4);
    const cmat W = complex_gaussian(rng, 8, 2);
    const cmat W_RF = complex_gaussian(rng, 8, 8);
    const cmat W_BB = W_RF.inverse() * W;
    const cvec y = complex_gaussian(rng, 8, 1);
    CHECK(rel(estimate(W_RF, W_BB, y), estimate(W, y)) <= 1e-10);
}

TEST_CASE("empirical estimate MSE matches the error covariance")
{
    for (ObservationMode obs : {ObservationMode::Noisy, ObservationMode::Noiseless})
    {
        const Scene s = scene(small_config(obs), 2);
        const double v2 = s.cfg.fc_noise_var;
        const CombinerSet c = design_combiner(s.r.channel, s.F, s.r.model, v2, s.cfg.rf_chains_fc);
        const double closed = real_trace(error_covariance(s.r.channel, s.F, s.r.model, v2));
        Rng rng(1234);
        const int n = 100000;
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
        {
            const cvec theta = sample_parameter(s.r.model, rng);
            const cvec y = receive_signal(s.r.channel, s.F_k, sense(s.r.model, theta, rng), v2, rng);
            acc += (estimate(c.W, y) - theta).squaredNorm();
        }
        CHECK(rel(acc / n, closed) <= 0.02);
    }
}
