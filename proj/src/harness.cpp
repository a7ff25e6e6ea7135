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

#include "mmwsn/harness.hpp"

#include "mmwsn/linalg.hpp"
#include "mmwsn/metrics.hpp"
#include "mmwsn/precoder.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace mmwsn
{

namespace
{
template <class E>
struct NameTable
{
    E value;
    const char *name;
};

constexpr NameTable<Design> design_names[] = {{Design::DigitalTotal, "digital_total"},
                                              {Design::DigitalPerSensor, "digital_per_sensor"},
                                              {Design::HybridTotal, "hybrid_total"},
                                              {Design::HybridPerSensor, "hybrid_per_sensor"},
                                              {Design::DominantDirectional, "dominant_directional"}};
constexpr NameTable<Bound> bound_names[] = {{Bound::Bcrb, "bcrb"}, {Bound::Centralized, "centralized"}};
constexpr NameTable<Axis> axis_names[] = {{Axis::SnrFcDb, "snr_fc_db"},
                                          {Axis::SensorCount, "sensor_count"},
                                          {Axis::RfChainsS, "rf_chains_s"},
                                          {Axis::SnrNDb, "snr_n_db"}};

template <class E, std::size_t N>
std::string name_of(const NameTable<E> (&table)[N], E v)
{
    for (const auto &t : table)
        if (t.value == v)
            return t.name;
    return "?";
}

template <class E, std::size_t N>
E value_of(const NameTable<E> (&table)[N], const std::string &s, const char *what)
{
    for (const auto &t : table)
        if (s == t.name)
            return t.value;
    throw ConfigError(std::string("unknown ") + what + " '" + s + "'");
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace

std::string to_string(Design d) { return name_of(design_names, d); }
std::string to_string(Bound b) { return name_of(bound_names, b); }
std::string to_string(Axis a) { return name_of(axis_names, a); }
Design parse_design(const std::string &s) { return value_of(design_names, s, "design"); }
Bound parse_bound(const std::string &s) { return value_of(bound_names, s, "bound"); }
Axis parse_axis(const std::string &s) { return value_of(axis_names, s, "sweep axis"); }

std::uint64_t derive_trial_seed(std::uint64_t seed_base, std::uint64_t trial_index)
{
    return seed_base ^ splitmix64(trial_index);
}

std::uint64_t substream_seed(std::uint64_t trial_seed, std::uint64_t stream)
{
    return splitmix64(trial_seed ^ splitmix64(0x5eed0000ULL + stream));
}

Realization draw_realization(const WsnConfig &cfg, std::uint64_t trial_seed)
{
    Rng channel_rng(substream_seed(trial_seed, 1));
    Rng model_rng(substream_seed(trial_seed, 2));
    Realization r;
    r.channel = generate_channel(cfg, channel_rng);
    r.model = build_measurement_model(cfg, model_rng);
    return r;
}

namespace
{

PowerMode mode_of(Design d, const WsnConfig &cfg)
{
    switch (d)
    {
    case Design::DigitalTotal:
    case Design::HybridTotal:
        return PowerMode::TotalBudget;
    case Design::DigitalPerSensor:
    case Design::HybridPerSensor:
        return PowerMode::PerSensor;
    case Design::DominantDirectional:
        break;
    }
    return cfg.power_mode;
}

// Shares the decomposition and the digital designs between the designs of one trial.
class Workspace
{
  public:
    Workspace(const Realization &r, const WsnConfig &cfg) : r_(r), cfg_(cfg) {}

    const ChannelDecomposition &dec()
    {
        if (!dec_)
            dec_ = decompose(r_.channel, r_.model);
        return *dec_;
    }

    const PrecoderSet &digital(PowerMode mode)
    {
        auto &slot = mode == PowerMode::TotalBudget ? total_ : per_sensor_;
        if (!slot)
            slot = assemble_digital_precoders(allocate_power(dec(), cfg_, mode), dec(), r_.model,
                                              cfg_.observation_mode);
        return *slot;
    }

    DesignOutcome evaluate(Design d)
    {
        const PowerMode mode = mode_of(d, cfg_);
        const PowerConstraint constraint = cfg_.constraint(mode);
        const PrecoderSet &dig = digital(mode);
        const double sv2 = cfg_.fc_noise_var;
        DesignOutcome out;
        switch (d)
        {
        case Design::DigitalTotal:
        case Design::DigitalPerSensor:
            out.F_k = normalize_to_constraint(dig.F_k, r_.model, constraint);
            out.F = block_diagonal(out.F_k);
            out.W = lmmse_combiner(r_.channel, out.F, r_.model, sv2);
            break;
        case Design::HybridTotal:
        case Design::HybridPerSensor:
        {
            HybridPrecoderSet h = factor_precoders(dig.F_k, r_.channel, cfg_.rf_chains_sensor, r_.model, constraint);
            out.F_k = h.products();
            out.F = h.stacked();
            CombinerSet c = design_combiner(r_.channel, out.F, r_.model, sv2, cfg_.rf_chains_fc);
            out.W = c.hybrid();
            out.hybrid = std::move(h);
            out.combiner = std::move(c);
            break;
        }
        case Design::DominantDirectional:
        {
            DominantDesign dd = dominant_directional_design(r_.channel, cfg_, r_.model, dig.F_k, constraint);
            out.F_k = dd.precoders.products();
            out.F = dd.precoders.stacked();
            out.W = dd.combiner.hybrid();
            out.hybrid = std::move(dd.precoders);
            out.combiner = std::move(dd.combiner);
            break;
        }
        }
        out.mse = mse_of_linear_transceiver(r_.channel, out.F, out.W, r_.model, sv2);
        return out;
    }

  private:
    const Realization &r_;
    const WsnConfig &cfg_;
    std::optional<ChannelDecomposition> dec_;
    std::optional<PrecoderSet> total_, per_sensor_;
};

double empirical_mse(const Realization &r, const DesignOutcome &o, double sv2, int draws, Rng &rng)
{
    std::vector<double> err(static_cast<std::size_t>(draws));
    for (int i = 0; i < draws; ++i)
    {
        const cvec theta = sample_parameter(r.model, rng);
        const auto x = sense(r.model, theta, rng);
        const cvec y = receive_signal(r.channel, o.F_k, x, sv2, rng);
        err[static_cast<std::size_t>(i)] = (theta - estimate(o.W, y)).squaredNorm();
    }
    return pairwise_sum(err) / draws;
}

} // namespace

DesignOutcome evaluate_design(Design d, const Realization &r, const WsnConfig &cfg)
{
    Workspace ws(r, cfg);
    return ws.evaluate(d);
}

std::optional<double> TrialRecord::get(const std::string &name) const
{
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return values[i];
    return std::nullopt;
}

TrialRecord run_trial(const WsnConfig &cfg, std::uint64_t trial_seed, const TrialOptions &opt)
{
    const Realization r = draw_realization(cfg, trial_seed);
    Workspace ws(r, cfg);
    Rng signal_rng(substream_seed(trial_seed, 3));
    TrialRecord rec;
    std::vector<std::pair<std::string, std::optional<double>>> empirical;
    for (Design d : opt.designs)
    {
        std::optional<double> v, e;
        try
        {
            const DesignOutcome o = ws.evaluate(d);
            v = o.mse;
            if (opt.empirical)
                e = empirical_mse(r, o, cfg.fc_noise_var, opt.empirical_draws, signal_rng);
        }
        catch (const NumericalError &)
        {
        }
        rec.names.push_back(to_string(d));
        rec.values.push_back(v);
        if (opt.empirical)
            empirical.emplace_back(to_string(d) + "_empirical", e);
    }
    for (Bound b : opt.bounds)
    {
        std::optional<double> v;
        try
        {
            if (b == Bound::Centralized && cfg.observation_mode == ObservationMode::Noisy)
                v = centralized_bound(r.model);
            if (b == Bound::Bcrb && cfg.observation_mode == ObservationMode::Noiseless)
            {
                const Design hd =
                    cfg.power_mode == PowerMode::TotalBudget ? Design::HybridTotal : Design::HybridPerSensor;
                const DesignOutcome o = ws.evaluate(hd);
                v = bcrb(r.channel, o.hybrid->F_RF, o.hybrid->F_BB, r.model, cfg.fc_noise_var);
            }
        }
        catch (const NumericalError &)
        {
        }
        rec.names.push_back(to_string(b));
        rec.values.push_back(v);
    }
    for (auto &[n, v] : empirical)
    {
        rec.names.push_back(n);
        rec.values.push_back(v);
    }
    return rec;
}

WsnConfig apply_axis(WsnConfig cfg, Axis axis, double value)
{
    auto as_count = [&](const char *what) {
        if (!(value >= 1.0) || value != std::floor(value) || value > 1e6)
            throw ConfigError(std::string(what) + " values must be positive integers");
        return static_cast<int>(value);
    };
    switch (axis)
    {
    case Axis::SnrFcDb:
        cfg.fc_noise_var = snr_to_variance(value);
        break;
    case Axis::SnrNDb:
        cfg.obs_noise_var = snr_to_variance(value);
        break;
    case Axis::RfChainsS:
        cfg.rf_chains_sensor = as_count("rf_chains_s");
        break;
    case Axis::SensorCount:
    {
        const int K = as_count("sensor_count");
        cfg.resize_sensors(K);
        // the total budget stays fixed and is split evenly
        cfg.sensor_power.assign(K, cfg.total_power / K);
        break;
    }
    }
    cfg.validate();
    return cfg;
}

std::vector<double> default_axis_values(Axis axis)
{
    switch (axis)
    {
    case Axis::SnrFcDb:
    case Axis::SnrNDb:
        return {-10, -5, 0, 5, 10, 15, 20, 25, 30};
    case Axis::SensorCount:
        return {5, 10, 20, 40};
    case Axis::RfChainsS:
        break;
    }
    return {1, 2, 3, 4, 5, 6};
}

unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("WSN_THREADS"))
    {
        char *end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1)
            n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

std::vector<ResultRow> run_sweep(const WsnConfig &cfg, const SweepSpec &spec, unsigned threads)
{
    if (spec.values.empty())
        throw ConfigError("sweep needs at least one axis value");
    if (spec.trials < 1)
        throw ConfigError("trials must be at least 1");
    if (spec.options.designs.empty() && spec.options.bounds.empty())
        throw ConfigError("nothing to evaluate: no designs or bounds requested");

    std::vector<WsnConfig> points;
    for (double v : spec.values)
        points.push_back(apply_axis(cfg, spec.axis, v));

    const std::size_t T = static_cast<std::size_t>(spec.trials);
    const std::size_t jobs = points.size() * T;
    std::vector<TrialRecord> records(jobs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;)
        {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs)
                return;
            try
            {
                records[j] = run_trial(points[j / T], derive_trial_seed(spec.seed_base, j % T), spec.options);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(jobs);
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads ? threads : worker_count(),
                                                       static_cast<unsigned>(jobs)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);

    std::vector<ResultRow> rows;
    const std::string axis = to_string(spec.axis);
    for (std::size_t a = 0; a < points.size(); ++a)
    {
        const TrialRecord &first = records[a * T];
        for (std::size_t c = 0; c < first.names.size(); ++c)
        {
            std::vector<double> xs;
            for (std::size_t i = 0; i < T; ++i)
                if (const auto &v = records[a * T + i].values[c])
                    xs.push_back(*v);
            if (xs.empty())
                continue;
            const double nx = static_cast<double>(xs.size());
            const double mean = pairwise_sum(xs) / nx;
            double se = 0.0;
            if (xs.size() > 1)
            {
                std::vector<double> dev;
                for (double x : xs)
                    dev.push_back((x - mean) * (x - mean));
                se = std::sqrt(pairwise_sum(dev) / (nx - 1.0) / nx);
            }
            rows.push_back({axis, spec.values[a], first.names[c], mean, se, static_cast<int>(xs.size()),
                            spec.seed_base});
        }
    }
    return rows;
}

namespace
{
std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
} // namespace

std::string format_csv(const std::vector<ResultRow> &rows)
{
    std::string out = std::string(csv_header) + "\n";
    for (const auto &r : rows)
        out += r.axis + "," + fmt(r.axis_value) + "," + r.design + "," + fmt(r.mean_mse) + "," + fmt(r.std_error) +
               "," + std::to_string(r.trials) + "," + std::to_string(r.seed_base) + "\n";
    return out;
}

std::string format_json(const std::vector<ResultRow> &rows)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto &r : rows)
    {
        nlohmann::ordered_json j;
        j["axis"] = r.axis;
        j["axis_value"] = r.axis_value;
        j["design"] = r.design;
        j["mean_mse"] = r.mean_mse;
        j["std_error"] = r.std_error;
        j["trials"] = r.trials;
        j["seed_base"] = r.seed_base;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<ResultRow> parse_csv(const std::string &text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != csv_header)
        throw ConfigError("result table header mismatch");
    std::vector<ResultRow> rows;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            f.push_back(cell);
        if (f.size() != 7)
            throw ConfigError("malformed result row: " + line);
        rows.push_back({f[0], std::stod(f[1]), f[2], std::stod(f[3]), std::stod(f[4]), std::stoi(f[5]),
                        std::stoull(f[6])});
    }
    return rows;
}

std::vector<ResultRow> parse_json(const std::string &text)
{
    std::vector<ResultRow> rows;
    try
    {
        for (const auto &j : nlohmann::json::parse(text))
            rows.push_back({j.at("axis").get<std::string>(), j.at("axis_value").get<double>(),
                            j.at("design").get<std::string>(), j.at("mean_mse").get<double>(),
                            j.at("std_error").get<double>(), j.at("trials").get<int>(),
                            j.at("seed_base").get<std::uint64_t>()});
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigError(std::string("malformed result table: ") + e.what());
    }
    return rows;
}

void emit(const std::vector<ResultRow> &rows, const std::string &format, const std::string &path)
{
    if (rows.empty())
        throw std::runtime_error("refusing to write an empty result table to " + path);
    std::string body;
    if (format == "csv")
        body = format_csv(rows);
    else if (format == "json")
        body = format_json(rows);
    else
        throw ConfigError("unknown output format '" + format + "'");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << body;
    out.flush();
    if (!out)
        throw std::runtime_error("write to " + path + " failed");
}

namespace
{
using nlohmann::json;

template <class T>
T get_as(const json &j, const char *key)
{
    try
    {
        return j.at(key).get<T>();
    }
    catch (const json::exception &)
    {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

template <class T>
std::vector<T> scalar_or_list(const json &j, const char *key, int K)
{
    const json &v = j.at(key);
    if (v.is_array())
    {
        std::vector<T> out;
        for (const auto &e : v)
        {
            if (!e.is_number())
                throw ConfigError(std::string("config key '") + key + "' must hold numbers");
            out.push_back(e.get<T>());
        }
        return out;
    }
    if (!v.is_number())
        throw ConfigError(std::string("config key '") + key + "' must be a number or a list");
    return std::vector<T>(static_cast<std::size_t>(std::max(K, 0)), v.get<T>());
}
} // namespace

WsnConfig config_from_json(const std::string &text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::exception &e)
    {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");

    static const std::set<std::string> known = {"K",          "N_T",          "N_R",        "N_RF_s",
                                                "N_RF_fc",    "L",            "m",          "q_k",
                                                "sigma_n_sq", "sigma_v_sq",   "power_mode", "P_T",
                                                "P_k",        "observation_mode", "spacing_ratio", "seed",
                                                "independent_aoa"};
    for (const auto &item : j.items())
        if (!known.count(item.key()))
            throw ConfigError("unknown config key '" + item.key() + "'");

    WsnConfig cfg = WsnConfig::reference();
    auto set_int = [&](const char *key, int &dst) {
        if (j.contains(key))
        {
            if (!j.at(key).is_number_integer())
                throw ConfigError(std::string("config key '") + key + "' must be an integer");
            dst = j.at(key).get<int>();
        }
    };
    auto set_real = [&](const char *key, double &dst) {
        if (j.contains(key))
        {
            if (!j.at(key).is_number())
                throw ConfigError(std::string("config key '") + key + "' must be a number");
            dst = j.at(key).get<double>();
        }
    };
    set_int("K", cfg.num_sensors);
    set_int("N_T", cfg.tx_antennas);
    set_int("N_R", cfg.rx_antennas);
    set_int("N_RF_s", cfg.rf_chains_sensor);
    set_int("N_RF_fc", cfg.rf_chains_fc);
    set_int("L", cfg.num_paths);
    set_int("m", cfg.param_dim);
    set_real("sigma_n_sq", cfg.obs_noise_var);
    set_real("sigma_v_sq", cfg.fc_noise_var);
    set_real("spacing_ratio", cfg.spacing_ratio);
    const int K = cfg.num_sensors;

    cfg.measurements = j.contains("q_k") ? scalar_or_list<int>(j, "q_k", K) : std::vector<int>(K, cfg.param_dim);

    const bool has_total = j.contains("P_T");
    const bool has_sensor = j.contains("P_k");
    if (has_total)
        set_real("P_T", cfg.total_power);
    if (has_sensor)
        cfg.sensor_power = scalar_or_list<double>(j, "P_k", K);
    else
        cfg.sensor_power.assign(K, cfg.total_power / K);
    if (has_sensor && !has_total)
    {
        cfg.total_power = 0.0;
        for (double p : cfg.sensor_power)
            cfg.total_power += p;
    }

    if (j.contains("power_mode"))
    {
        const auto s = get_as<std::string>(j, "power_mode");
        if (s == "total")
            cfg.power_mode = PowerMode::TotalBudget;
        else if (s == "per_sensor")
            cfg.power_mode = PowerMode::PerSensor;
        else
            throw ConfigError("power_mode must be 'total' or 'per_sensor'");
    }
    if (j.contains("observation_mode"))
    {
        const auto s = get_as<std::string>(j, "observation_mode");
        if (s == "noisy")
            cfg.observation_mode = ObservationMode::Noisy;
        else if (s == "noiseless")
            cfg.observation_mode = ObservationMode::Noiseless;
        else
            throw ConfigError("observation_mode must be 'noisy' or 'noiseless'");
    }
    if (j.contains("seed"))
    {
        if (!j.at("seed").is_number_unsigned())
            throw ConfigError("seed must be a non-negative integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("independent_aoa"))
    {
        if (!j.at("independent_aoa").is_boolean())
            throw ConfigError("independent_aoa must be true or false");
        cfg.independent_aoa = j.at("independent_aoa").get<bool>();
    }
    cfg.validate();
    return cfg;
}

WsnConfig load_config(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

} // namespace mmwsn
