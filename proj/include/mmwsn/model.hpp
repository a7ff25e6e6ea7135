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

#ifndef MMWSN_MODEL_HPP
#define MMWSN_MODEL_HPP

#include "mmwsn/types.hpp"

#include <vector>

namespace mmwsn
{

enum class PowerMode
{
    TotalBudget,
    PerSensor
};

enum class ObservationMode
{
    Noisy,
    Noiseless
};

// The constraint a precoder has to meet: one shared budget or one budget per sensor (watts).
struct PowerConstraint
{
    PowerMode mode = PowerMode::TotalBudget;
    double total = 1.0;
    std::vector<double> per_sensor;
};

// Scenario description. Field meaning follows the usual notation of the
// coherent-MAC sensor network: K sensors with N_T antennas and N_RF_s RF chains,
// a fusion center with N_R antennas and N_RF_fc RF chains, L clusters, an
// m-dimensional parameter and q_k measurements at sensor k.
struct WsnConfig
{
    int num_sensors = 20;      // K
    int tx_antennas = 10;      // N_T
    int rx_antennas = 16;      // N_R
    int rf_chains_sensor = 3;  // N_RF_s
    int rf_chains_fc = 6;      // N_RF_fc
    int num_paths = 6;         // L
    int param_dim = 3;         // m
    std::vector<int> measurements = std::vector<int>(20, 3); // q_k

    double obs_noise_var = 0.1; // sigma_n^2
    double fc_noise_var = 1.0;  // sigma_v^2

    PowerMode power_mode = PowerMode::TotalBudget;
    double total_power = 1.0;                                        // P_T (W)
    std::vector<double> sensor_power = std::vector<double>(20, 0.05); // P_k (W)

    ObservationMode observation_mode = ObservationMode::Noisy;
    double spacing_ratio = 0.5;
    bool independent_aoa = false;
    std::uint64_t seed = 1;

    // Throws ConfigError on the first violated invariant.
    void validate() const;

    int total_measurements() const;
    // sigma_n^2 as seen by the designs: zero for noiseless sensors.
    double effective_obs_noise_var() const;
    PowerConstraint constraint(PowerMode mode) const;
    PowerConstraint constraint() const { return constraint(power_mode); }

    // K=20, N_T=10, N_R=16, N_RF_s=3, N_RF_fc=6, L=6, m=3, q_k=3,
    // SNR_n=10 dB, SNR_FC=0 dB, P_T=0 dBW, P_k=-13 dBW.
    static WsnConfig reference();

    // Resize the per-sensor lists to K, repeating the first entry.
    void resize_sensors(int K);
};

// x, q_k, etc. for the linear Gaussian sensing model x_k = M_k theta + n_k, theta ~ CN(0, I_m).
struct MeasurementModel
{
    std::vector<cmat> sensor_matrices; // M_k, q_k x m
    cmat stacked;                      // M, q x m
    std::vector<int> offsets;          // first row of M_k inside M
    double noise_var = 0.0;            // sigma_n^2, zero in noiseless mode

    int param_dim() const { return static_cast<int>(stacked.cols()); }
    int total_measurements() const { return static_cast<int>(stacked.rows()); }
    int num_sensors() const { return static_cast<int>(sensor_matrices.size()); }
    int measurements(int k) const { return static_cast<int>(sensor_matrices[k].rows()); }

    cmat noise_covariance() const;
    cmat prior_covariance() const;
    // M M^H + R_n, the covariance of the stacked observations.
    cmat observation_covariance() const;
    cmat sensor_observation_covariance(int k) const;
};

// Stacks prescribed blocks; used by tests and by build_measurement_model.
MeasurementModel make_measurement_model(std::vector<cmat> blocks, double noise_var);

MeasurementModel build_measurement_model(const WsnConfig &cfg, Rng &rng);

cvec sample_parameter(const MeasurementModel &model, Rng &rng);

// Per-sensor observations x_k.
std::vector<cvec> sense(const MeasurementModel &model, const cvec &theta, Rng &rng);

// Stacks per-sensor vectors in sensor order.
cvec stack(const std::vector<cvec> &parts);

// 10^(-snr_db/10)
double snr_to_variance(double snr_db);
// dBW -> W
double dbw_to_watts(double dbw);

// Standard circular complex Gaussian: real and imaginary parts N(0, 1/2).
cx complex_gaussian(Rng &rng);
cmat complex_gaussian(Rng &rng, Eigen::Index rows, Eigen::Index cols);

} // namespace mmwsn

#endif
