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

#ifndef MMWSN_TYPES_HPP
#define MMWSN_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace mmwsn
{

using cx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rmat = Eigen::MatrixXd;
using rvec = Eigen::VectorXd;

// Every stochastic operation takes an explicitly owned generator.
using Rng = std::mt19937_64;

// Bad scenario description (dimensions, budgets, unknown keys). CLI exit code 2.
class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Base for failures of the numerical designs. CLI exit code 3.
class NumericalError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Concatenated channel has fewer usable eigen-streams than parameters.
class DegenerateChannel : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

// Water-filling left no stream with positive power.
class AllStreamsInactive : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

// Iterative power solver hit its iteration cap.
class NonConvergence : public NumericalError
{
  public:
    NonConvergence(const std::string &what, double residual)
        : NumericalError(what), residual_(residual)
    {
    }
    double residual() const { return residual_; }

  private:
    double residual_;
};

// Atoms selected by SOMP became numerically dependent.
class RankCollapse : public NumericalError
{
  public:
    using NumericalError::NumericalError;
};

} // namespace mmwsn

#endif
