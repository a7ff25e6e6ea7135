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

#include "mmwsn/metrics.hpp"

#include "mmwsn/linalg.hpp"

#include <algorithm>
#include <map>

namespace mmwsn
{

namespace
{
cmat inverse_pd(cmat A)
{
    A = hermitian_part(A);
    return A.llt().solve(cmat::Identity(A.rows(), A.cols()));
}
} // namespace

cmat error_covariance(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                      double sigma_v_sq)
{
    const cmat H = channel.G * F;
    const cmat HM = H * model.stacked;
    cmat Q = model.noise_var * H * H.adjoint();
    Q.diagonal().array() += sigma_v_sq;
    cmat info = HM.adjoint() * hermitian_part(Q).llt().solve(HM);
    info.diagonal().array() += 1.0;
    return hermitian_part(inverse_pd(info));
}

cmat error_covariance_woodbury(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                               double sigma_v_sq)
{
    const cmat H = channel.G * F;
    const cmat &M = model.stacked;
    const double sn2 = model.noise_var;
    const auto m = M.cols();
    if (sn2 == 0.0)
    {
        const cmat HM = H * M;
        cmat info = HM.adjoint() * HM / sigma_v_sq;
        info.diagonal().array() += 1.0;
        return hermitian_part(inverse_pd(info));
    }
    cmat inner = (sn2 / sigma_v_sq) * H.adjoint() * H;
    inner.diagonal().array() += 1.0;
    cmat info = cmat::Identity(m, m) + (M.adjoint() * M - M.adjoint() * inner.partialPivLu().solve(M)) / sn2;
    return hermitian_part(inverse_pd(info));
}

double mse_of_linear_transceiver(const ChannelRealization &channel, const cmat &F, const cmat &W,
                                 const MeasurementModel &model, double sigma_v_sq)
{
    const cmat H = channel.G * F;
    const auto m = model.stacked.cols();
    const cmat C = W.adjoint() * H * model.stacked - cmat::Identity(m, m);
    const cmat HW = H.adjoint() * W;
    // W^H (sigma_n^2 H H^H + sigma_v^2 I) W, without forming the N_R x N_R matrix
    const double noise = model.noise_var * HW.squaredNorm() + sigma_v_sq * W.squaredNorm();
    return C.squaredNorm() + noise;
}

double mse_closed_form(const rvec &p, const rvec &lambda_M, const rvec &sigma_G_sq, double sigma_n_sq,
                       double sigma_v_sq)
{
    double s = 0.0;
    for (Eigen::Index l = 0; l < p.size(); ++l)
    {
        const double ps = p(l) * sigma_G_sq(l);
        s += (sigma_v_sq + sigma_n_sq * ps) / (sigma_v_sq + (sigma_n_sq + lambda_M(l)) * ps);
    }
    return s;
}

double mse_closed_form_noiseless(const rvec &p, const rvec &sigma_G_sq, double sigma_v_sq)
{
    double s = 0.0;
    for (Eigen::Index l = 0; l < p.size(); ++l)
        s += sigma_v_sq / (sigma_v_sq + p(l) * sigma_G_sq(l));
    return s;
}

double bcrb(const ChannelRealization &channel, const cmat &F_RF, const cmat &F_BB, const MeasurementModel &model,
            double sigma_v_sq)
{
    const cmat HM = channel.G * (F_RF * (F_BB * model.stacked));
    cmat info = HM.adjoint() * HM / sigma_v_sq;
    info.diagonal().array() += 1.0;
    return real_trace(inverse_pd(info));
}

double centralized_bound(const MeasurementModel &model)
{
    if (model.noise_var == 0.0)
        return 0.0;
    const cmat &M = model.stacked;
    cmat info = M.adjoint() * M / model.noise_var;
    info.diagonal().array() += 1.0;
    return real_trace(inverse_pd(info));
}

MseReport mse_report(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                     double sigma_v_sq)
{
    MseReport r;
    const cmat E = error_covariance(channel, F, model, sigma_v_sq);
    r.mse_matrix_form = real_trace(E);
    r.per_stream = E.diagonal().real();
    if (model.noise_var == 0.0)
    {
        const auto q = model.stacked.rows();
        r.bcrb = bcrb(channel, F, cmat::Identity(q, q), model, sigma_v_sq);
    }
    else
        r.centralized = centralized_bound(model);
    return r;
}

DominantDesign dominant_directional_design(const ChannelRealization &channel, const WsnConfig &cfg,
                                           const MeasurementModel &model, const std::vector<cmat> &digital_F_k,
                                           const PowerConstraint &constraint)
{
    const int K = channel.num_sensors();
    const int L = channel.num_paths();
    if (static_cast<int>(digital_F_k.size()) != K)
        throw ConfigError("one digital precoder per sensor expected");

    DominantDesign d;
    std::vector<cmat> rf, bb;
    // receive-dictionary column -> aggregate gain of the sensors that picked it
    std::map<int, double> votes;
    for (int k = 0; k < K; ++k)
    {
        Eigen::Index n = 0;
        channel.alpha.col(k).cwiseAbs2().maxCoeff(&n);
        d.sensor_paths.push_back(static_cast<int>(n));
        cmat R = channel.A_T[k].col(n).replicate(1, cfg.rf_chains_sensor);
        bb.push_back(pinv(R) * digital_F_k[k]);
        rf.push_back(std::move(R));
        const int col = channel.independent_aoa() ? k * L + static_cast<int>(n) : static_cast<int>(n);
        votes[col] += std::norm(channel.alpha(n, k));
    }

    std::vector<cmat> prod;
    for (int k = 0; k < K; ++k)
        prod.push_back(rf[k] * bb[k]);
    const auto scale = normalization_factors(prod, model, constraint);
    for (int k = 0; k < K; ++k)
        bb[k] *= scale[k];
    d.precoders = make_hybrid(std::move(rf), std::move(bb));
    d.precoders.selected.assign(d.sensor_paths.size(), {});
    for (int k = 0; k < K; ++k)
        d.precoders.selected[k].assign(cfg.rf_chains_sensor, d.sensor_paths[k]);

    std::vector<std::pair<int, double>> order(votes.begin(), votes.end());
    std::stable_sort(order.begin(), order.end(), [](const auto &a, const auto &b) { return a.second > b.second; });
    std::vector<int> cols;
    for (int i = 0; i < cfg.rf_chains_fc; ++i)
        cols.push_back(i < static_cast<int>(order.size()) ? order[i].first : order.front().first);

    CombinerSet &c = d.combiner;
    const cmat F = d.precoders.stacked();
    c.R_yy = received_covariance(channel, F, model, cfg.fc_noise_var);
    c.W = c.R_yy.llt().solve(channel.G * F * model.stacked);
    c.W_RF.resize(channel.rx_antennas(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
        c.W_RF.col(static_cast<Eigen::Index>(i)) = channel.A_R.col(cols[i]);
    c.W_BB = weighted_baseband(c.W_RF, c.R_yy, c.W);
    c.selected = cols;
    return d;
}

} // namespace mmwsn
