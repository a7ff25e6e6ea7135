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

#ifndef MMWSN_HARNESS_HPP
#define MMWSN_HARNESS_HPP

#include "mmwsn/channel.hpp"
#include "mmwsn/combiner.hpp"
#include "mmwsn/model.hpp"
#include "mmwsn/somp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mmwsn
{

enum class Design
{
    DigitalTotal,
    DigitalPerSensor,
    HybridTotal,
    HybridPerSensor,
    DominantDirectional
};

enum class Bound
{
    Bcrb,
    Centralized
};

enum class Axis
{
    SnrFcDb,
    SensorCount,
    RfChainsS,
    SnrNDb
};

std::string to_string(Design d);
std::string to_string(Bound b);
std::string to_string(Axis a);
Design parse_design(const std::string &s);
Bound parse_bound(const std::string &s);
Axis parse_axis(const std::string &s);

// Counter-based seeding: trial i of a sweep always gets the same seed, however many trials run.
std::uint64_t derive_trial_seed(std::uint64_t seed_base, std::uint64_t trial_index);
// Independent sub-stream of a trial seed (channel, measurements, signal-level draws).
std::uint64_t substream_seed(std::uint64_t trial_seed, std::uint64_t stream);

struct Realization
{
    ChannelRealization channel;
    MeasurementModel model;
};

Realization draw_realization(const WsnConfig &cfg, std::uint64_t trial_seed);

// Precoders and combiner of one design on one realization.
struct DesignOutcome
{
    cmat F;                  // stacked effective precoder (F_RF F_BB for hybrid designs)
    std::vector<cmat> F_k;   // per-sensor effective precoders
    cmat W;                  // combiner used for the estimate (W_RF W_BB for hybrid designs)
    std::optional<HybridPrecoderSet> hybrid;
    std::optional<CombinerSet> combiner;
    double mse = 0.0;        // analytic E||theta - W^H y||^2
};

DesignOutcome evaluate_design(Design d, const Realization &r, const WsnConfig &cfg);

struct TrialOptions
{
    std::vector<Design> designs;
    std::vector<Bound> bounds;
    bool empirical = false;
    int empirical_draws = 500;
};

// One named value per requested design/bound; a failed design leaves its cell empty.
struct TrialRecord
{
    std::vector<std::string> names;
    std::vector<std::optional<double>> values;

    std::optional<double> get(const std::string &name) const;
};

TrialRecord run_trial(const WsnConfig &cfg, std::uint64_t trial_seed, const TrialOptions &opt);

struct SweepSpec
{
    Axis axis = Axis::SnrFcDb;
    std::vector<double> values;
    int trials = 200;
    TrialOptions options;
    std::uint64_t seed_base = 1;
};

struct ResultRow
{
    std::string axis;
    double axis_value = 0.0;
    std::string design;
    double mean_mse = 0.0;
    double std_error = 0.0;
    int trials = 0;
    std::uint64_t seed_base = 0;
};

// Patches one sweep coordinate into a copy of cfg and re-validates it.
WsnConfig apply_axis(WsnConfig cfg, Axis axis, double value);

std::vector<double> default_axis_values(Axis axis);

// Worker count: hardware concurrency capped by WSN_THREADS.
unsigned worker_count();

std::vector<ResultRow> run_sweep(const WsnConfig &cfg, const SweepSpec &spec, unsigned threads = 0);

inline constexpr const char *csv_header = "axis,axis_value,design,mean_mse,std_error,trials,seed_base";

std::string format_csv(const std::vector<ResultRow> &rows);
std::string format_json(const std::vector<ResultRow> &rows);
std::vector<ResultRow> parse_csv(const std::string &text);
std::vector<ResultRow> parse_json(const std::string &text);
// Writes the table; refuses an empty table and reports IO failures with the path.
void emit(const std::vector<ResultRow> &rows, const std::string &format, const std::string &path);

// JSON scenario description. Keys mirror the configuration field names; unknown keys are rejected.
WsnConfig config_from_json(const std::string &text);
WsnConfig load_config(const std::string &path);

} // namespace mmwsn

#endif
