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

#include "mmwsn/channel.hpp"

#include "mmwsn/linalg.hpp"

#include <json.hpp>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace mmwsn
{

cvec array_response(int n_antennas, double angle, double spacing_ratio)
{
    const double step = 2.0 * std::numbers::pi * spacing_ratio * std::cos(angle);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n_antennas));
    cvec a(n_antennas);
    for (int i = 0; i < n_antennas; ++i)
        a(i) = std::polar(amp, -step * i);
    return a;
}

ChannelSpectrum spectrum_of(const cmat &G)
{
    Eigen::JacobiSVD<cmat> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ChannelSpectrum s;
    s.U = svd.matrixU();
    s.singular = svd.singularValues();
    s.V = svd.matrixV();
    const double cut = s.singular.size() ? 1e-12 * s.singular(0) : 0.0;
    for (Eigen::Index i = 0; i < s.singular.size(); ++i)
        if (s.singular(i) > cut)
            ++s.rank;
    return s;
}

struct ChannelRealization::Cache
{
    std::once_flag once;
    ChannelSpectrum spectrum;
};

ChannelRealization::ChannelRealization() : cache_(std::make_shared<Cache>()) {}

const ChannelSpectrum &ChannelRealization::spectrum() const
{
    std::call_once(cache_->once, [this] { cache_->spectrum = spectrum_of(G); });
    return cache_->spectrum;
}

ChannelRealization channel_from_parameters(const cmat &alpha, const rmat &aoa, const rmat &aod, int n_tx,
                                           int n_rx, double spacing_ratio)
{
    const auto L = alpha.rows();
    const auto K = alpha.cols();
    if (aod.rows() != L || aod.cols() != K || aoa.rows() != L || (aoa.cols() != 1 && aoa.cols() != K))
        throw ConfigError("channel parameter shapes disagree");

    ChannelRealization ch;
    ch.alpha = alpha;
    ch.aoa = aoa;
    ch.aod = aod;
    ch.spacing_ratio = spacing_ratio;

    const double scale = std::sqrt(static_cast<double>(n_rx) * n_tx / static_cast<double>(L));
    auto rx_block = [&](Eigen::Index col) {
        cmat A(n_rx, L);
        for (Eigen::Index n = 0; n < L; ++n)
            A.col(n) = array_response(n_rx, aoa(n, col), spacing_ratio);
        return A;
    };

    const cmat shared = rx_block(0);
    ch.G.resize(n_rx, K * n_tx);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        cmat AR = aoa.cols() == 1 ? shared : rx_block(k);
        cmat AT(n_tx, L);
        for (Eigen::Index n = 0; n < L; ++n)
            AT.col(n) = array_response(n_tx, aod(n, k), spacing_ratio);
        cmat Dk = cmat::Zero(L, L);
        Dk.diagonal() = scale * alpha.col(k);
        cmat Gk = AR * Dk * AT.adjoint();
        ch.G.middleCols(k * n_tx, n_tx) = Gk;
        ch.A_R_k.push_back(std::move(AR));
        ch.A_T.push_back(std::move(AT));
        ch.D.push_back(std::move(Dk));
        ch.G_k.push_back(std::move(Gk));
    }
    if (aoa.cols() == 1)
        ch.A_R = shared;
    else
    {
        ch.A_R.resize(n_rx, L * K);
        for (Eigen::Index k = 0; k < K; ++k)
            ch.A_R.middleCols(k * L, L) = ch.A_R_k[k];
    }
    return ch;
}

ChannelRealization generate_channel(const WsnConfig &cfg, Rng &rng)
{
    const int L = cfg.num_paths;
    const int K = cfg.num_sensors;
    cmat alpha = complex_gaussian(rng, L, K);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    rmat aoa(L, cfg.independent_aoa ? K : 1);
    for (Eigen::Index j = 0; j < aoa.cols(); ++j)
        for (Eigen::Index i = 0; i < L; ++i)
            aoa(i, j) = angle(rng);
    rmat aod(L, K);
    for (Eigen::Index j = 0; j < K; ++j)
        for (Eigen::Index i = 0; i < L; ++i)
            aod(i, j) = angle(rng);
    return channel_from_parameters(alpha, aoa, aod, cfg.tx_antennas, cfg.rx_antennas, cfg.spacing_ratio);
}

std::uint64_t geometry_digest(const WsnConfig &cfg)
{
    std::ostringstream s;
    s.precision(17);
    s << cfg.num_sensors << ',' << cfg.tx_antennas << ',' << cfg.rx_antennas << ',' << cfg.num_paths << ','
      << cfg.spacing_ratio << ',' << cfg.independent_aoa;
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (unsigned char c : s.str())
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace
{
using nlohmann::json;

json real_matrix(const rmat &A)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i)
    {
        json r = json::array();
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            r.push_back(A(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

rmat real_matrix(const json &j)
{
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    rmat A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        if (static_cast<Eigen::Index>(j.at(i).size()) != cols)
            throw ConfigError("ragged matrix in channel record");
        for (Eigen::Index k = 0; k < cols; ++k)
            A(i, k) = j.at(i).at(k).get<double>();
    }
    return A;
}
} // namespace

std::string channel_to_json(const ChannelRealization &ch, const WsnConfig &cfg)
{
    json j;
    j["format"] = "mmwsn-channel-1";
    j["digest"] = geometry_digest(cfg);
    j["N_T"] = cfg.tx_antennas;
    j["N_R"] = cfg.rx_antennas;
    j["spacing_ratio"] = ch.spacing_ratio;
    j["alpha_re"] = real_matrix(ch.alpha.real());
    j["alpha_im"] = real_matrix(ch.alpha.imag());
    j["aoa"] = real_matrix(ch.aoa);
    j["aod"] = real_matrix(ch.aod);
    return j.dump(1);
}

ChannelRealization channel_from_json(const std::string &text, const WsnConfig &cfg)
{
    json j;
    try
    {
        j = json::parse(text);
        if (j.at("format").get<std::string>() != "mmwsn-channel-1")
            throw ConfigError("unknown channel record format");
        if (j.at("digest").get<std::uint64_t>() != geometry_digest(cfg))
            throw ConfigError("channel record was produced for a different geometry");
        const rmat re = real_matrix(j.at("alpha_re"));
        const rmat im = real_matrix(j.at("alpha_im"));
        if (re.rows() != im.rows() || re.cols() != im.cols())
            throw ConfigError("alpha real/imag shapes disagree");
        cmat alpha(re.rows(), re.cols());
        alpha.real() = re;
        alpha.imag() = im;
        return channel_from_parameters(alpha, real_matrix(j.at("aoa")), real_matrix(j.at("aod")),
                                       j.at("N_T").get<int>(), j.at("N_R").get<int>(),
                                       j.at("spacing_ratio").get<double>());
    }
    catch (const json::exception &e)
    {
        throw ConfigError(std::string("malformed channel record: ") + e.what());
    }
}

ChannelDecomposition decompose(const ChannelRealization &channel, const MeasurementModel &model)
{
    return decompose(channel.spectrum(), channel.tx_antennas(), model);
}

ChannelDecomposition decompose(const ChannelSpectrum &spec, int n_tx, const MeasurementModel &model)
{
    const int m = model.param_dim();
    if (spec.rank < m)
        throw DegenerateChannel("channel rank " + std::to_string(spec.rank) + " is below m = " + std::to_string(m));

    ChannelDecomposition d;
    d.V_g = spec.V;
    d.lambda_g = spec.singular.cwiseAbs2();
    d.channel_rank = spec.rank;
    d.V_g1 = spec.V.leftCols(m);
    const auto K = d.V_g1.rows() / n_tx;
    for (Eigen::Index k = 0; k < K; ++k)
        d.V_g1_k.push_back(d.V_g1.middleRows(k * n_tx, n_tx));

    Eigen::JacobiSVD<cmat> svd(model.stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
    d.U_M = svd.matrixU();
    d.sigma_M = svd.singularValues();
    d.V_M = svd.matrixV();
    d.lambda_M = d.sigma_M.cwiseAbs2();
    for (int k = 0; k < model.num_sensors(); ++k)
        d.U_M_k.push_back(d.U_M.middleRows(model.offsets[k], model.measurements(k)));
    return d;
}

double transmit_subspace_residual(const ChannelRealization &ch, int k)
{
    return projection_residual(ch.A_T[k], ch.G_k[k].adjoint());
}

double receive_subspace_residual(const ChannelRealization &ch) { return projection_residual(ch.A_R, ch.G); }

} // namespace mmwsn
