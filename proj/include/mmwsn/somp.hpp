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

#ifndef MMWSN_SOMP_HPP
#define MMWSN_SOMP_HPP

#include "mmwsn/channel.hpp"
#include "mmwsn/precoder.hpp"

#include <vector>

namespace mmwsn
{

// Atoms whose Gram matrix exceeds this condition number count as dependent.
inline constexpr double somp_gram_condition_limit = 1e12;

struct SompResult
{
    std::vector<int> selected;          // dictionary columns, in selection order
    cmat coefficients;                  // |selected| x target columns, fitted to the original target
    std::vector<double> residual_norms; // ||T - A_sel X||_F after each iteration
    std::vector<double> normalized_residual_norms; // norm of the residual carried to the next step (1 or 0)
    std::vector<double> selection_scores;          // row energy of Psi at each chosen atom
    cmat approximation;                 // A_sel X
    bool rank_collapsed = false;        // stopped early: the next atom was numerically dependent

    cmat atoms(const cmat &dictionary) const;
};

// Simultaneous OMP: greedily picks `count` columns of `dictionary` that jointly
// best represent every column of `target`. Ties go to the lowest index.
SompResult somp_decompose(const cmat &target, const cmat &dictionary, int count);

struct HybridPrecoderSet
{
    std::vector<cmat> F_RF_k;            // N_T x N_RF_s, columns copied from A_T_k
    std::vector<cmat> F_BB_k;            // N_RF_s x q_k
    std::vector<std::vector<int>> selected;
    std::vector<double> fit_residual;    // ||F_k - F_RF_k F_BB_k||_F / ||F_k||_F before rescaling
    bool rank_collapsed = false;         // some sensor uses fewer RF chains than requested
    cmat F_RF, F_BB;                     // block-diagonal stacks

    std::vector<cmat> products() const;  // F_RF_k F_BB_k
    cmat stacked() const;                // F_RF F_BB
};

// Factor each F_k over its own transmit dictionary, then rescale the baseband
// stage to meet the constraint with equality. Dependent atoms end a sensor's
// selection early (flagged); strict = true throws RankCollapse instead.
HybridPrecoderSet factor_precoders(const std::vector<cmat> &F_k, const ChannelRealization &channel, int n_rf,
                                   const MeasurementModel &model, const PowerConstraint &constraint,
                                   bool strict = false);
HybridPrecoderSet factor_precoders(const PrecoderSet &digital, const ChannelRealization &channel,
                                   const WsnConfig &cfg, const MeasurementModel &model);

// Assembles the stacks from per-sensor blocks (used by the baseline designs too).
HybridPrecoderSet make_hybrid(std::vector<cmat> F_RF_k, std::vector<cmat> F_BB_k);

} // namespace mmwsn

#endif
