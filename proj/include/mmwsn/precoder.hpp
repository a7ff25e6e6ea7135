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

#ifndef MMWSN_PRECODER_HPP
#define MMWSN_PRECODER_HPP

#include "mmwsn/channel.hpp"
#include "mmwsn/model.hpp"

#include <optional>
#include <vector>

namespace mmwsn
{

enum class PowerRegime
{
    TotalNoisy,
    TotalNoiseless,
    PerSensorNoisy,
    PerSensorNoiseless
};

PowerRegime regime_for(PowerMode power, ObservationMode obs);

struct PowerAllocation
{
    rvec p;                            // watts per stream
    std::optional<double> multiplier;  // mu (noisy) or gamma (noiseless); total-budget regimes only
    PowerRegime regime = PowerRegime::TotalNoisy;
    int iterations = 0;                // active-set passes or gradient iterations
    double kkt_residual = 0.0;
};

// Water-filling over the eigen-streams under one total budget. Streams with a
// zero channel gain (or, noisy case, zero observation gain) get no power.
PowerAllocation waterfill_total_noisy(const rvec &lambda_M, const rvec &sigma_G_sq, double sigma_n_sq,
                                      double sigma_v_sq, double P_T);
PowerAllocation waterfill_total_noiseless(const rvec &sigma_G_sq, double sigma_v_sq, double P_T);

// Rows of Phi_diag are diag((V_g1_k)^H V_g1_k), one per sensor.
struct SensorCoupling
{
    std::vector<cmat> Phi;
    rmat Phi_diag; // K x m
};

SensorCoupling sensor_coupling(const ChannelDecomposition &dec);

struct SolverOptions
{
    double target = 1e-10;     // keep iterating while the stationarity residual is above this
    double tolerance = 1e-6;   // a stalled or capped run is accepted below this, else NonConvergence
    int max_iterations = 10000;
};

// Convex per-sensor budget problems solved by spectral projected gradient.
// Throws NonConvergence when the iteration cap is reached.
PowerAllocation solve_per_sensor_noisy(const rvec &lambda_M, const rvec &sigma_G_sq, const rmat &Phi_diag,
                                       double sigma_n_sq, double sigma_v_sq, const rvec &P,
                                       const SolverOptions &opt = {});
PowerAllocation solve_per_sensor_noiseless(const rvec &sigma_G_sq, const rmat &Phi_diag, double sigma_v_sq,
                                           const rvec &P, const SolverOptions &opt = {});

// Euclidean projection onto {x >= 0, A x <= b} by Dykstra's alternating projections.
rvec project_polytope(const rvec &y, const rmat &A, const rvec &b, int max_sweeps = 20000, double tol = 1e-15);

// Allocation for the regime implied by (power, cfg.observation_mode).
PowerAllocation allocate_power(const ChannelDecomposition &dec, const WsnConfig &cfg, PowerMode power);

struct PrecoderSet
{
    std::vector<cmat> F_k;  // N_T x q_k
    cmat F;                 // block diagonal
    cmat Sigma;             // diag(sqrt(p))
    PowerAllocation allocation;
    bool structure_exact = true; // every sensor block has q_k >= m and full column rank
};

// F_k = V_g1_k Sigma U_M_k^+ (noisy) or V_g1_k Sigma M_k^+ (noiseless).
PrecoderSet assemble_digital_precoders(const PowerAllocation &alloc, const ChannelDecomposition &dec,
                                       const MeasurementModel &model, ObservationMode mode);

// Tr(F (M M^H + sigma_n^2 I) F^H), with the model's own noise variance.
double transmit_power(const cmat &F, const MeasurementModel &model);
// Tr(F_k (M_k M_k^H + sigma_n^2 I) F_k^H)
double sensor_transmit_power(const cmat &F_k, const MeasurementModel &model, int k);
std::vector<double> sensor_transmit_powers(const std::vector<cmat> &F_k, const MeasurementModel &model);

// Rescales so the constraint is met with equality: one global factor for a total
// budget, one factor per sensor otherwise. Zero blocks are left untouched.
std::vector<double> normalization_factors(const std::vector<cmat> &F_k, const MeasurementModel &model,
                                          const PowerConstraint &constraint);
std::vector<cmat> normalize_to_constraint(std::vector<cmat> F_k, const MeasurementModel &model,
                                          const PowerConstraint &constraint);

} // namespace mmwsn

#endif
