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

#ifndef MMWSN_TEST_HELPERS_HPP
#define MMWSN_TEST_HELPERS_HPP

#include "mmwsn/channel.hpp"
#include "mmwsn/metrics.hpp"
#include "mmwsn/model.hpp"

#include <cmath>

namespace testing
{

using namespace mmwsn;

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double rel(const cmat &A, const cmat &B) { return (A - B).norm() / std::max(B.norm(), 1e-300); }

// Scaled-down scenario used throughout the unit tests.
inline WsnConfig small_config(ObservationMode obs = ObservationMode::Noisy, PowerMode pm = PowerMode::TotalBudget)
{
    WsnConfig cfg;
    cfg.num_sensors = 4;
    cfg.tx_antennas = 8;
    cfg.rx_antennas = 8;
    cfg.num_paths = 4;
    cfg.param_dim = 2;
    cfg.measurements.assign(4, 2);
    cfg.rf_chains_sensor = 2;
    cfg.rf_chains_fc = 3;
    cfg.obs_noise_var = 0.1;
    cfg.fc_noise_var = 0.1;
    cfg.total_power = 1.0;
    cfg.sensor_power.assign(4, 0.25);
    cfg.observation_mode = obs;
    cfg.power_mode = pm;
    cfg.validate();
    return cfg;
}

inline rvec random_positive(Rng &rng, int n, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    rvec v(n);
    for (int i = 0; i < n; ++i)
        v(i) = u(rng);
    return v;
}

// Descending copy.
inline rvec sorted_desc(rvec v)
{
    std::sort(v.data(), v.data() + v.size(), [](double a, double b) { return a > b; });
    return v;
}

} // namespace testing

#endif
