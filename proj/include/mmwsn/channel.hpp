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

#ifndef MMWSN_CHANNEL_HPP
#define MMWSN_CHANNEL_HPP

#include "mmwsn/model.hpp"

#include <memory>
#include <string>
#include <vector>

namespace mmwsn
{

// ULA steering vector: entry i = exp(-j i 2 pi d cos(angle)) / sqrt(n).
cvec array_response(int n_antennas, double angle, double spacing_ratio);

// Thin SVD of the concatenated channel, descending singular values.
struct ChannelSpectrum
{
    cmat U;             // N_R x r
    rvec singular;      // r, descending
    cmat V;             // K N_T x r
    int rank = 0;       // singular values above 1e-12 * sigma_max
};

ChannelSpectrum spectrum_of(const cmat &G);

class ChannelRealization
{
  public:
    ChannelRealization();

    cmat alpha;              // L x K path gains
    rmat aoa;                // L x 1 (shared) or L x K (independent_aoa)
    rmat aod;                // L x K
    double spacing_ratio = 0.5;

    std::vector<cmat> A_R_k; // per-sensor receive responses, N_R x L each (all equal when shared)
    cmat A_R;                // receive dictionary: N_R x L, or the column-concatenation of A_R_k
    std::vector<cmat> A_T;   // N_T x L per sensor
    std::vector<cmat> D;     // L x L per sensor, sqrt(N_R N_T / L) diag(alpha_k)
    std::vector<cmat> G_k;   // N_R x N_T per sensor
    cmat G;                  // N_R x K N_T

    int num_sensors() const { return static_cast<int>(G_k.size()); }
    int tx_antennas() const { return static_cast<int>(G.cols()) / std::max(1, num_sensors()); }
    int rx_antennas() const { return static_cast<int>(G.rows()); }
    int num_paths() const { return static_cast<int>(alpha.rows()); }
    bool independent_aoa() const { return aoa.cols() > 1; }

    // SVD of G, computed on first use; safe under concurrent readers.
    const ChannelSpectrum &spectrum() const;

  private:
    struct Cache;
    std::shared_ptr<Cache> cache_;
};

// Rebuilds every derived matrix from (alpha, aoa, aod). Bitwise reproducible.
ChannelRealization channel_from_parameters(const cmat &alpha, const rmat &aoa, const rmat &aod, int n_tx,
                                           int n_rx, double spacing_ratio);

ChannelRealization generate_channel(const WsnConfig &cfg, Rng &rng);

// Replay record: path parameters plus a digest of the geometry they belong to.
std::string channel_to_json(const ChannelRealization &ch, const WsnConfig &cfg);
ChannelRealization channel_from_json(const std::string &text, const WsnConfig &cfg);
std::uint64_t geometry_digest(const WsnConfig &cfg);

struct ChannelDecomposition
{
    cmat V_g;                      // thin right singular vectors of G
    rvec lambda_g;                 // eigenvalues of G^H G (squared singular values), descending
    int channel_rank = 0;
    cmat V_g1;                     // first m columns
    std::vector<cmat> V_g1_k;      // N_T x m row blocks

    cmat U_M;                      // q x m
    rvec sigma_M;                  // m
    cmat V_M;                      // m x m
    rvec lambda_M;                 // sigma_M^2
    std::vector<cmat> U_M_k;       // q_k x m row blocks

    int param_dim() const { return static_cast<int>(V_g1.cols()); }
    rvec sigma_G_sq() const { return lambda_g.head(param_dim()); }
};

// Throws DegenerateChannel when rank(G) < m.
ChannelDecomposition decompose(const ChannelRealization &channel, const MeasurementModel &model);
// Same, on an explicit spectrum (lets tests inject re-phased singular vectors).
ChannelDecomposition decompose(const ChannelSpectrum &spec, int n_tx, const MeasurementModel &model);

// Least-squares residual of G_k^H onto span(A_T_k) and of G onto span(A_R); both relative.
double transmit_subspace_residual(const ChannelRealization &ch, int k);
double receive_subspace_residual(const ChannelRealization &ch);

} // namespace mmwsn

#endif
