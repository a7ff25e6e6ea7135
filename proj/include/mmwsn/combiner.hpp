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

#ifndef MMWSN_COMBINER_HPP
#define MMWSN_COMBINER_HPP

#include "mmwsn/channel.hpp"
#include "mmwsn/somp.hpp"

namespace mmwsn
{

struct CombinerSet
{
    cmat W;       // N_R x m, fully digital LMMSE
    cmat W_RF;    // N_R x N_RF_fc, columns copied from the receive dictionary
    cmat W_BB;    // N_RF_fc x m
    cmat R_yy;    // N_R x N_R
    std::vector<int> selected;
    bool rank_collapsed = false; // fewer RF chains than requested: the next atom was dependent

    cmat hybrid() const { return W_RF * W_BB; }
};

// G F (M M^H + R_n) F^H G^H + sigma_v^2 I, exactly Hermitian. F is the stacked K N_T x q precoder.
cmat received_covariance(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                         double sigma_v_sq);

// R_yy^{-1} G F M by a Cholesky solve.
cmat lmmse_combiner(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                    double sigma_v_sq);
// G F ((M M^H + R_n) F^H G^H G F + sigma_v^2 I_q)^{-1} M, the push-through form of the same matrix.
cmat lmmse_combiner_pushthrough(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                                double sigma_v_sq);

// Weighted SOMP over R^{1/2} A_R; the RF stage keeps the unweighted atoms and the
// baseband stage is the R-weighted least-squares fit of W. If the atoms become
// dependent before n_rf are chosen, the chains selected so far are kept and the
// result is flagged; with strict = true a RankCollapse is thrown instead.
struct HybridCombiner
{
    cmat W_RF, W_BB;
    std::vector<int> selected;
    bool rank_collapsed = false;
};
HybridCombiner hybrid_combiner(const cmat &W, const cmat &R_yy, const cmat &dictionary, int n_rf,
                               bool strict = false);

// (W_RF^H R W_RF)^{-1} W_RF^H R W, solved as min ||R^{1/2}(W - W_RF X)||_F by an
// orthogonal decomposition. Directions of R^{1/2} W_RF below 1e-6 of the largest
// count as dependent (the SOMP Gram limit); the minimum-norm solution is returned.
cmat weighted_baseband(const cmat &W_RF, const cmat &R_yy, const cmat &W);
cmat weighted_baseband_root(const cmat &W_RF, const cmat &R_root, const cmat &W);

CombinerSet design_combiner(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                            double sigma_v_sq, int n_rf, bool strict = false);

cvec estimate(const cmat &W, const cvec &y);
cvec estimate(const cmat &W_RF, const cmat &W_BB, const cvec &y);

// y = sum_k G_k F_k x_k + v, v ~ CN(0, sigma_v^2 I).
cvec receive_signal(const ChannelRealization &channel, const std::vector<cmat> &F_k, const std::vector<cvec> &x,
                    double sigma_v_sq, Rng &rng);

} // namespace mmwsn

#endif
