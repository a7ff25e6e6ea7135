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

#ifndef MMWSN_METRICS_HPP
#define MMWSN_METRICS_HPP

#include "mmwsn/combiner.hpp"
#include "mmwsn/precoder.hpp"
#include "mmwsn/somp.hpp"

#include <optional>

namespace mmwsn
{

// Error covariance of the LMMSE estimate for the stacked precoder F:
// (I + M^H H^H (sigma_n^2 H H^H + sigma_v^2 I)^{-1} H M)^{-1}, H = G F.
cmat error_covariance(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                      double sigma_v_sq);
// Same matrix through the Woodbury identity (q x q inner inverse). Falls back to
// the noiseless expression when the model has no observation noise.
cmat error_covariance_woodbury(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                               double sigma_v_sq);

// E||theta - W^H y||^2 for any linear precoder/combiner pair.
double mse_of_linear_transceiver(const ChannelRealization &channel, const cmat &F, const cmat &W,
                                 const MeasurementModel &model, double sigma_v_sq);

// sum_l (sigma_v^2 + sigma_n^2 p_l s_l) / (sigma_v^2 + (sigma_n^2 + lambda_l) p_l s_l)
double mse_closed_form(const rvec &p, const rvec &lambda_M, const rvec &sigma_G_sq, double sigma_n_sq,
                       double sigma_v_sq);
// sum_l sigma_v^2 / (sigma_v^2 + p_l s_l)
double mse_closed_form_noiseless(const rvec &p, const rvec &sigma_G_sq, double sigma_v_sq);

// Bayesian CRB of the noiseless model under a hybrid precoder:
// Tr((I + M^H F^H G^H G F M / sigma_v^2)^{-1}) with F = F_RF F_BB.
double bcrb(const ChannelRealization &channel, const cmat &F_RF, const cmat &F_BB, const MeasurementModel &model,
            double sigma_v_sq);

// Tr((I + M^H R_n^{-1} M)^{-1}); zero without observation noise.
double centralized_bound(const MeasurementModel &model);

struct MseReport
{
    double mse_matrix_form = 0.0;
    std::optional<double> mse_scalar_form;
    std::optional<double> bcrb;
    std::optional<double> centralized;
    std::optional<double> empirical;
    rvec per_stream;
};

// LMMSE report for a stacked precoder; the bound that applies to the model's mode is filled in.
MseReport mse_report(const ChannelRealization &channel, const cmat &F, const MeasurementModel &model,
                     double sigma_v_sq);

struct DominantDesign
{
    HybridPrecoderSet precoders;
    CombinerSet combiner;
    std::vector<int> sensor_paths; // strongest path index per sensor
};

// Baseline that steers every RF chain of sensor k along its strongest path. The
// baseband stages are the best fits given those beams: least-squares projection
// of the digital precoder, rescaled to the constraint, and the weighted LMMSE
// baseband at the fusion center.
DominantDesign dominant_directional_design(const ChannelRealization &channel, const WsnConfig &cfg,
                                           const MeasurementModel &model, const std::vector<cmat> &digital_F_k,
                                           const PowerConstraint &constraint);

} // namespace mmwsn

#endif
