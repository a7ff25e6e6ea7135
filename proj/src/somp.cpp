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

#include "mmwsn/somp.hpp"

#include "mmwsn/linalg.hpp"

#include <string>

namespace mmwsn
{

cmat SompResult::atoms(const cmat &dictionary) const
{
    cmat A(dictionary.rows(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t i = 0; i < selected.size(); ++i)
        A.col(static_cast<Eigen::Index>(i)) = dictionary.col(selected[i]);
    return A;
}

SompResult somp_decompose(const cmat &target, const cmat &dictionary, int count)
{
    if (count < 0 || count > dictionary.cols())
        throw ConfigError("SOMP count exceeds the dictionary size");
    if (target.rows() != dictionary.rows())
        throw ConfigError("SOMP target and dictionary row counts differ");

    SompResult r;
    r.coefficients = cmat::Zero(0, target.cols());
    r.approximation = cmat::Zero(target.rows(), target.cols());
    std::vector<bool> used(dictionary.cols(), false);
    cmat residual = target;
    cmat A(dictionary.rows(), 0);

    for (int it = 0; it < count; ++it)
    {
        const rvec energy = (dictionary.adjoint() * residual).rowwise().squaredNorm();
        Eigen::Index best = -1;
        for (Eigen::Index n = 0; n < energy.size(); ++n)
            if (!used[n] && (best < 0 || energy(n) > energy(best)))
                best = n;

        cmat trial(A.rows(), A.cols() + 1);
        trial << A, dictionary.col(best);
        const cmat gram = trial.adjoint() * trial;
        if (condition_number(gram) > somp_gram_condition_limit)
        {
            r.rank_collapsed = true;
            break;
        }
        A = std::move(trial);
        used[best] = true;
        r.selected.push_back(static_cast<int>(best));
        r.selection_scores.push_back(energy(best));

        // least squares against the original target
        r.coefficients = A.colPivHouseholderQr().solve(target);
        r.approximation = A * r.coefficients;
        residual = target - r.approximation;
        const double nrm = residual.norm();
        r.residual_norms.push_back(nrm);
        if (nrm > 0.0)
            residual /= nrm;
        r.normalized_residual_norms.push_back(residual.norm());
    }
    return r;
}

std::vector<cmat> HybridPrecoderSet::products() const
{
    std::vector<cmat> out;
    for (std::size_t k = 0; k < F_RF_k.size(); ++k)
        out.push_back(F_RF_k[k] * F_BB_k[k]);
    return out;
}

cmat HybridPrecoderSet::stacked() const { return F_RF * F_BB; }

HybridPrecoderSet make_hybrid(std::vector<cmat> F_RF_k, std::vector<cmat> F_BB_k)
{
    HybridPrecoderSet h;
    h.F_RF_k = std::move(F_RF_k);
    h.F_BB_k = std::move(F_BB_k);
    h.F_RF = block_diagonal(h.F_RF_k);
    h.F_BB = block_diagonal(h.F_BB_k);
    return h;
}

HybridPrecoderSet factor_precoders(const std::vector<cmat> &F_k, const ChannelRealization &channel, int n_rf,
                                   const MeasurementModel &model, const PowerConstraint &constraint,
                                   bool strict)
{
    if (static_cast<int>(F_k.size()) != channel.num_sensors())
        throw ConfigError("one precoder per sensor expected");
    std::vector<cmat> rf, bb;
    std::vector<std::vector<int>> sel;
    std::vector<double> fit;
    bool collapsed = false;
    for (std::size_t k = 0; k < F_k.size(); ++k)
    {
        const SompResult s = somp_decompose(F_k[k], channel.A_T[k], n_rf);
        if (s.rank_collapsed && strict)
            throw RankCollapse("transmit atoms of sensor " + std::to_string(k) + " became dependent");
        collapsed = collapsed || s.rank_collapsed;
        rf.push_back(s.atoms(channel.A_T[k]));
        bb.push_back(s.coefficients);
        sel.push_back(s.selected);
        const double nf = F_k[k].norm();
        fit.push_back(nf > 0.0 ? (F_k[k] - s.approximation).norm() / nf : 0.0);
    }

    // rescale on the product, then move the factor into the baseband stage
    std::vector<cmat> prod;
    for (std::size_t k = 0; k < rf.size(); ++k)
        prod.push_back(rf[k] * bb[k]);
    const auto scale = normalization_factors(prod, model, constraint);
    for (std::size_t k = 0; k < bb.size(); ++k)
        bb[k] *= scale[k];

    HybridPrecoderSet h = make_hybrid(std::move(rf), std::move(bb));
    h.selected = std::move(sel);
    h.fit_residual = std::move(fit);
    h.rank_collapsed = collapsed;
    return h;
}

HybridPrecoderSet factor_precoders(const PrecoderSet &digital, const ChannelRealization &channel,
                                   const WsnConfig &cfg, const MeasurementModel &model)
{
    return factor_precoders(digital.F_k, channel, cfg.rf_chains_sensor, model, cfg.constraint());
}

} // namespace mmwsn
