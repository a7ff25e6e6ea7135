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

#include "mmwsn/combiner.hpp"

#include "mmwsn/linalg.hpp"

#include <cmath>
#include <string>

namespace mmwsn
{

cmat received_covariance(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                         double sigma_v_sq)
{
    const cmat H = channel.G * F;
    cmat R = H * model.observation_covariance() * H.adjoint();
    R.diagonal().array() += sigma_v_sq;
    return hermitian_part(R);
}

cmat lmmse_combiner(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                    double sigma_v_sq)
{
    const cmat R = received_covariance(channel, F, model, sigma_v_sq);
    return R.llt().solve(channel.G * F * model.stacked);
}

cmat lmmse_combiner_pushthrough(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                                double sigma_v_sq)
{
    const cmat H = channel.G * F;
    cmat inner = model.observation_covariance() * H.adjoint() * H;
    inner.diagonal().array() += sigma_v_sq;
    return H * inner.partialPivLu().solve(model.stacked);
}

cmat weighted_baseband_root(const cmat &W_RF, const cmat &R_root, const cmat &W)
{
    // Never forms W_RF^H R W_RF, whose condition number is the square of this one.
    // Directions that SOMP would reject as dependent are dropped here too.
    // (the threshold must be set before compute: the RZ step uses the rank found then)
    Eigen::CompleteOrthogonalDecomposition<cmat> cod;
    cod.setThreshold(1.0 / std::sqrt(somp_gram_condition_limit));
    cod.compute(R_root * W_RF);
    return cod.solve(R_root * W);
}

cmat weighted_baseband(const cmat &W_RF, const cmat &R_yy, const cmat &W)
{
    return weighted_baseband_root(W_RF, hermitian_sqrt(R_yy), W);
}

HybridCombiner hybrid_combiner(const cmat &W, const cmat &R_yy, const cmat &dictionary, int n_rf, bool strict)
{
    const cmat root = hermitian_sqrt(R_yy);
    const SompResult s = somp_decompose(root * W, root * dictionary, n_rf);
    if (s.rank_collapsed && strict)
        throw RankCollapse("receive atoms became dependent after " + std::to_string(s.selected.size()) +
                           " selections");
    HybridCombiner h;
    h.W_RF = s.atoms(dictionary);
    h.W_BB = weighted_baseband_root(h.W_RF, root, W);
    h.selected = s.selected;
    h.rank_collapsed = s.rank_collapsed;
    return h;
}

CombinerSet design_combiner(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                            double sigma_v_sq, int n_rf, bool strict)
{
    CombinerSet c;
    c.R_yy = received_covariance(channel, F, model, sigma_v_sq);
    c.W = c.R_yy.llt().solve(channel.G * F * model.stacked);
    HybridCombiner h = hybrid_combiner(c.W, c.R_yy, channel.A_R, n_rf, strict);
    c.W_RF = std::move(h.W_RF);
    c.W_BB = std::move(h.W_BB);
    c.selected = std::move(h.selected);
    c.rank_collapsed = h.rank_collapsed;
    return c;
}

cvec estimate(const cmat &W, const cvec &y) { return W.adjoint() * y; }

cvec estimate(const cmat &W_RF, const cmat &W_BB, const cvec &y) { return W_BB.adjoint() * (W_RF.adjoint() * y); }

cvec receive_signal(const ChannelRealization &channel, const std::vector<cmat> &F_k, const std::vector<cvec> &x,
                    double sigma_v_sq, Rng &rng)
{
    cvec y = std::sqrt(sigma_v_sq) * complex_gaussian(rng, channel.rx_antennas(), 1);
    for (std::size_t k = 0; k < F_k.size(); ++k)
        y += channel.G_k[k] * (F_k[k] * x[k]);
    return y;
}

} // namespace mmwsn
