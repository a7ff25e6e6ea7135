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
#include "mmwsn/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace mmwsn;

namespace
{

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty())
            out.push_back(item);
    return out;
}

double to_number(const std::string &s)
{
    std::size_t used = 0;
    double v = 0.0;
    try
    {
        v = std::stod(s, &used);
    }
    catch (const std::exception &)
    {
        used = 0;
    }
    if (used != s.size() || s.empty())
        throw ConfigError("'" + s + "' is not a number");
    return v;
}

// "a,b,c" or "start:step:stop" (inclusive)
std::vector<double> parse_values(const std::string &text)
{
    const auto parts = split(text, ':');
    if (text.find(':') != std::string::npos)
    {
        if (parts.size() != 3)
            throw ConfigError("range must be start:step:stop");
        const double a = to_number(parts[0]), step = to_number(parts[1]), b = to_number(parts[2]);
        if (step == 0.0 || (b - a) / step < 0.0)
            throw ConfigError("range step does not reach the stop value");
        std::vector<double> v;
        const long n = static_cast<long>(std::floor((b - a) / step + 1e-9));
        for (long i = 0; i <= n; ++i)
            v.push_back(a + static_cast<double>(i) * step);
        return v;
    }
    std::vector<double> v;
    for (const auto &p : split(text, ','))
        v.push_back(to_number(p));
    if (v.empty())
        throw ConfigError("empty value list");
    return v;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"mmwsn: hybrid precoder/combiner designs for mmWave sensor networks"};
    app.require_subcommand(1);

    std::string config_path, sweep = "snr_fc_db", values, designs = "digital_total,hybrid_total,dominant_directional",
                             bounds, out_path, format = "csv";
    int trials = 200, draws = 500;
    std::uint64_t seed = 0;
    bool empirical = false;

    auto *sim = app.add_subcommand("simulate", "Run a seeded Monte-Carlo sweep");
    sim->add_option("--config", config_path, "JSON scenario file (defaults to the reference scenario)");
    sim->add_option("--sweep", sweep, "snr_fc_db | sensor_count | rf_chains_s | snr_n_db");
    sim->add_option("--values", values, "comma list or start:step:stop");
    sim->add_option("--trials", trials, "trials per axis value")->check(CLI::Range(1, 1000000));
    sim->add_option("--designs", designs, "comma list of designs");
    sim->add_option("--bounds", bounds, "comma list: bcrb, centralized");
    sim->add_option("--out", out_path, "output file")->required();
    sim->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    auto *seed_opt = sim->add_option("--seed", seed, "seed base (overrides the config seed)");
    sim->add_flag("--empirical", empirical, "add signal-level Monte-Carlo MSE columns");
    sim->add_option("--draws", draws, "signal draws per trial for --empirical")->check(CLI::Range(1, 10000000));

    std::string dump_config, dump_out;
    std::uint64_t dump_seed = 0, dump_trial = 0;
    auto *dump = app.add_subcommand("channel-dump", "Write the channel record of one trial as JSON");
    dump->add_option("--config", dump_config, "JSON scenario file");
    auto *dump_seed_opt = dump->add_option("--seed", dump_seed, "seed base");
    dump->add_option("--trial", dump_trial, "trial index");
    dump->add_option("--out", dump_out, "output file (stdout if omitted)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try
    {
        if (*sim)
        {
            WsnConfig cfg = config_path.empty() ? WsnConfig::reference() : load_config(config_path);
            SweepSpec spec;
            spec.axis = parse_axis(sweep);
            spec.values = values.empty() ? default_axis_values(spec.axis) : parse_values(values);
            spec.trials = trials;
            spec.seed_base = *seed_opt ? seed : cfg.seed;
            for (const auto &d : split(designs, ','))
                spec.options.designs.push_back(parse_design(d));
            for (const auto &b : split(bounds, ','))
                spec.options.bounds.push_back(parse_bound(b));
            spec.options.empirical = empirical;
            spec.options.empirical_draws = draws;
            const auto rows = run_sweep(cfg, spec);
            if (rows.empty())
                throw NumericalError("every trial failed; no rows to write");
            emit(rows, format, out_path);
        }
        else if (*dump)
        {
            const WsnConfig cfg = dump_config.empty() ? WsnConfig::reference() : load_config(dump_config);
            const std::uint64_t base = *dump_seed_opt ? dump_seed : cfg.seed;
            const Realization r = draw_realization(cfg, derive_trial_seed(base, dump_trial));
            const std::string text = channel_to_json(r.channel, cfg) + "\n";
            if (dump_out.empty())
                std::cout << text;
            else
            {
                std::ofstream f(dump_out, std::ios::binary);
                if (!(f << text))
                    throw std::runtime_error("cannot write " + dump_out);
            }
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    catch (const NumericalError &e)
    {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
