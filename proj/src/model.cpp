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

#include "mmwsn/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace mmwsn
{

namespace
{
void require(bool ok, const std::string &msg)
{
    if (!ok)
        throw ConfigError(msg);
}
} // namespace

void WsnConfig::validate() const
{
    require(num_sensors >= 1, "K must be at least 1");
    require(tx_antennas >= 1 && rx_antennas >= 1, "antenna counts must be at least 1");
    require(rf_chains_sensor >= 1 && rf_chains_fc >= 1, "RF chain counts must be at least 1");
    require(num_paths >= 1, "L must be at least 1");
    require(param_dim >= 1, "m must be at least 1");
    require(static_cast<int>(measurements.size()) == num_sensors,
            "q_k must have K entries (got " + std::to_string(measurements.size()) + ")");
    for (int q : measurements)
        require(q >= 1, "every q_k must be at least 1");
    require(rf_chains_sensor <= std::min(tx_antennas, num_paths), "N_RF_s must not exceed min(N_T, L)");
    require(rf_chains_fc <= std::min(rx_antennas, num_paths), "N_RF_fc must not exceed min(N_R, L)");
    require(param_dim <= total_measurements(), "m must not exceed sum(q_k)");
    require(param_dim <= num_paths, "m must not exceed L");
    require(std::isfinite(obs_noise_var) && obs_noise_var > 0.0, "sigma_n_sq must be positive");
    require(std::isfinite(fc_noise_var) && fc_noise_var > 0.0, "sigma_v_sq must be positive");
    require(std::isfinite(total_power) && total_power > 0.0, "P_T must be positive");
    require(static_cast<int>(sensor_power.size()) == num_sensors, "P_k must have K entries");
    for (double p : sensor_power)
        require(std::isfinite(p) && p > 0.0, "every P_k must be positive");
    require(std::isfinite(spacing_ratio) && spacing_ratio > 0.0, "spacing_ratio must be positive");
}

int WsnConfig::total_measurements() const
{
    return std::accumulate(measurements.begin(), measurements.end(), 0);
}

double WsnConfig::effective_obs_noise_var() const
{
    return observation_mode == ObservationMode::Noiseless ? 0.0 : obs_noise_var;
}

PowerConstraint WsnConfig::constraint(PowerMode mode) const
{
    PowerConstraint c;
    c.mode = mode;
    c.total = total_power;
    c.per_sensor = sensor_power;
    return c;
}

WsnConfig WsnConfig::reference()
{
    WsnConfig cfg;
    cfg.obs_noise_var = snr_to_variance(10.0);
    cfg.fc_noise_var = snr_to_variance(0.0);
    cfg.total_power = dbw_to_watts(0.0);
    cfg.sensor_power.assign(20, dbw_to_watts(-13.0));
    return cfg;
}

void WsnConfig::resize_sensors(int K)
{
    const int q = measurements.empty() ? param_dim : measurements.front();
    const double p = sensor_power.empty() ? total_power / K : sensor_power.front();
    num_sensors = K;
    measurements.assign(K, q);
    sensor_power.assign(K, p);
}

cmat MeasurementModel::noise_covariance() const
{
    const auto q = stacked.rows();
    return cmat::Identity(q, q) * noise_var;
}

cmat MeasurementModel::prior_covariance() const
{
    return cmat::Identity(stacked.cols(), stacked.cols());
}

cmat MeasurementModel::observation_covariance() const
{
    return stacked * stacked.adjoint() + noise_covariance();
}

cmat MeasurementModel::sensor_observation_covariance(int k) const
{
    const cmat &Mk = sensor_matrices[k];
    return Mk * Mk.adjoint() + cmat::Identity(Mk.rows(), Mk.rows()) * noise_var;
}

MeasurementModel make_measurement_model(std::vector<cmat> blocks, double noise_var)
{
    if (blocks.empty())
        throw ConfigError("measurement model needs at least one sensor");
    const auto m = blocks.front().cols();
    Eigen::Index q = 0;
    MeasurementModel model;
    for (const auto &b : blocks)
    {
        if (b.cols() != m)
            throw ConfigError("all M_k must have m columns");
        model.offsets.push_back(static_cast<int>(q));
        q += b.rows();
    }
    model.stacked.resize(q, m);
    for (std::size_t k = 0; k < blocks.size(); ++k)
        model.stacked.middleRows(model.offsets[k], blocks[k].rows()) = blocks[k];
    model.sensor_matrices = std::move(blocks);
    model.noise_var = noise_var;
    return model;
}

cx complex_gaussian(Rng &rng)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

cmat complex_gaussian(Rng &rng, Eigen::Index rows, Eigen::Index cols)
{
    cmat out(rows, cols);
    // column-major fill order is part of the determinism contract
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            out(i, j) = complex_gaussian(rng);
    return out;
}

MeasurementModel build_measurement_model(const WsnConfig &cfg, Rng &rng)
{
    std::vector<cmat> blocks;
    blocks.reserve(cfg.num_sensors);
    for (int k = 0; k < cfg.num_sensors; ++k)
        blocks.push_back(complex_gaussian(rng, cfg.measurements[k], cfg.param_dim));
    return make_measurement_model(std::move(blocks), cfg.effective_obs_noise_var());
}

cvec sample_parameter(const MeasurementModel &model, Rng &rng)
{
    return complex_gaussian(rng, model.param_dim(), 1);
}

std::vector<cvec> sense(const MeasurementModel &model, const cvec &theta, Rng &rng)
{
    if (theta.size() != model.param_dim())
        throw ConfigError("theta has wrong length");
    std::vector<cvec> x;
    x.reserve(model.sensor_matrices.size());
    const double sd = std::sqrt(model.noise_var);
    for (const auto &Mk : model.sensor_matrices)
    {
        cvec xk = Mk * theta;
        if (model.noise_var > 0.0)
            xk += sd * complex_gaussian(rng, Mk.rows(), 1);
        x.push_back(std::move(xk));
    }
    return x;
}

cvec stack(const std::vector<cvec> &parts)
{
    Eigen::Index n = 0;
    for (const auto &p : parts)
        n += p.size();
    cvec out(n);
    Eigen::Index at = 0;
    for (const auto &p : parts)
    {
        out.segment(at, p.size()) = p;
        at += p.size();
    }
    return out;
}

double snr_to_variance(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }

} // namespace mmwsn
