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

#include "mmwsn/precoder.hpp"

#include "mmwsn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmwsn
{

PowerRegime regime_for(PowerMode power, ObservationMode obs)
{
    const bool noisy = obs == ObservationMode::Noisy;
    if (power == PowerMode::TotalBudget)
        return noisy ? PowerRegime::TotalNoisy : PowerRegime::TotalNoiseless;
    return noisy ? PowerRegime::PerSensorNoisy : PowerRegime::PerSensorNoiseless;
}

namespace
{

// Per-stream data of the scalarized problems. Stream l contributes
// (a + b_l p_l)/(a + c_l p_l) to the MSE and costs w_l p_l watts.
struct Streams
{
    double a = 1.0;
    rvec b, c, w;
    std::vector<bool> usable;

    Eigen::Index size() const { return c.size(); }

    double mse(const rvec &p) const
    {
        double s = 0.0;
        for (Eigen::Index l = 0; l < size(); ++l)
            s += (a + b(l) * p(l)) / (a + c(l) * p(l));
        return s;
    }

    rvec gradient(const rvec &p) const
    {
        rvec g(size());
        for (Eigen::Index l = 0; l < size(); ++l)
        {
            const double den = a + c(l) * p(l);
            g(l) = a * (b(l) - c(l)) / (den * den);
        }
        return g;
    }
};

Streams noisy_streams(const rvec &lambda_M, const rvec &sigma_G_sq, double sn2, double sv2)
{
    if (lambda_M.size() != sigma_G_sq.size())
        throw ConfigError("lambda_M and sigma_G_sq lengths differ");
    Streams s;
    s.a = sv2;
    const auto m = sigma_G_sq.size();
    s.b.resize(m);
    s.c.resize(m);
    s.w.resize(m);
    for (Eigen::Index l = 0; l < m; ++l)
    {
        s.b(l) = sn2 * sigma_G_sq(l);
        s.c(l) = (sn2 + lambda_M(l)) * sigma_G_sq(l);
        s.w(l) = lambda_M(l) + sn2;
        s.usable.push_back(sigma_G_sq(l) > 0.0 && lambda_M(l) > 0.0);
    }
    return s;
}

Streams noiseless_streams(const rvec &sigma_G_sq, double sv2)
{
    Streams s;
    s.a = sv2;
    const auto m = sigma_G_sq.size();
    s.b = rvec::Zero(m);
    s.c = sigma_G_sq;
    s.w = rvec::Ones(m);
    for (Eigen::Index l = 0; l < m; ++l)
        s.usable.push_back(sigma_G_sq(l) > 0.0);
    return s;
}

// Water level on an active set: p_l = (mu*x_l - y_l)/w_l with sum_l w_l p_l = P.
// x_l, y_l are the per-stream slope and offset of the KKT solution.
PowerAllocation waterfill(const rvec &x, const rvec &y, const rvec &w, std::vector<bool> active, double P,
                          PowerRegime regime)
{
    if (!(P > 0.0))
        throw ConfigError("power budget must be positive");
    const auto m = x.size();
    PowerAllocation out;
    out.regime = regime;
    out.p = rvec::Zero(m);
    double mu = 0.0;
    for (int pass = 1;; ++pass)
    {
        double num = P, den = 0.0;
        for (Eigen::Index l = 0; l < m; ++l)
            if (active[l])
            {
                num += y(l);
                den += x(l);
            }
        if (den <= 0.0)
            throw AllStreamsInactive("no stream can carry power");
        mu = num / den;
        bool changed = false;
        for (Eigen::Index l = 0; l < m; ++l)
            if (active[l] && mu * x(l) - y(l) <= 0.0)
            {
                active[l] = false;
                changed = true;
            }
        out.iterations = pass;
        if (!changed)
            break;
    }
    for (Eigen::Index l = 0; l < m; ++l)
        if (active[l])
            out.p(l) = (mu * x(l) - y(l)) / w(l);
    out.multiplier = mu;
    return out;
}

} // namespace

PowerAllocation waterfill_total_noisy(const rvec &lambda_M, const rvec &sigma_G_sq, double sigma_n_sq,
                                      double sigma_v_sq, double P_T)
{
    const Streams s = noisy_streams(lambda_M, sigma_G_sq, sigma_n_sq, sigma_v_sq);
    const auto m = s.size();
    rvec x = rvec::Zero(m), y = rvec::Zero(m);
    for (Eigen::Index l = 0; l < m; ++l)
        if (s.usable[l])
        {
            x(l) = std::sqrt(sigma_v_sq * lambda_M(l) / ((sigma_n_sq + lambda_M(l)) * sigma_G_sq(l)));
            y(l) = sigma_v_sq / sigma_G_sq(l);
        }
    return waterfill(x, y, s.w, s.usable, P_T, PowerRegime::TotalNoisy);
}

PowerAllocation waterfill_total_noiseless(const rvec &sigma_G_sq, double sigma_v_sq, double P_T)
{
    const Streams s = noiseless_streams(sigma_G_sq, sigma_v_sq);
    const auto m = s.size();
    rvec x = rvec::Zero(m), y = rvec::Zero(m);
    for (Eigen::Index l = 0; l < m; ++l)
        if (s.usable[l])
        {
            x(l) = std::sqrt(sigma_v_sq / sigma_G_sq(l));
            y(l) = sigma_v_sq / sigma_G_sq(l);
        }
    return waterfill(x, y, s.w, s.usable, P_T, PowerRegime::TotalNoiseless);
}

SensorCoupling sensor_coupling(const ChannelDecomposition &dec)
{
    SensorCoupling sc;
    const auto K = static_cast<Eigen::Index>(dec.V_g1_k.size());
    sc.Phi_diag.resize(K, dec.param_dim());
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const cmat &V = dec.V_g1_k[k];
        sc.Phi.push_back(V.adjoint() * V);
        sc.Phi_diag.row(k) = V.colwise().squaredNorm();
    }
    return sc;
}

namespace
{

// Dykstra converges slowly near vertices and can stall far from the answer when
// the start is far outside. Its output still points at the active face, so finish
// with a small active-set loop on the exact projection problem: solve the
// equality-constrained projection on the working set, drop negative multipliers,
// add the most violated constraint, stop at a KKT point.
rvec polish_projection(const rvec &y, const rmat &A, const rvec &b, const rvec &x)
{
    const auto n = y.size();
    const auto K = A.rows();
    // constraint i < n is -x_i <= 0, constraint n + k is A_k x <= b_k
    auto row = [&](Eigen::Index i) -> rvec {
        if (i < n)
            return -rvec::Unit(n, i);
        return A.row(i - n).transpose();
    };
    auto rhs = [&](Eigen::Index i) { return i < n ? 0.0 : b(i - n); };
    const double scale = std::max({1.0, y.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>()});
    const double near = 1e-9 * scale;
    const double tight = 1e-12 * scale;

    std::vector<Eigen::Index> work;
    for (Eigen::Index i = 0; i < n + K; ++i)
        if (row(i).squaredNorm() > 0.0 && row(i).dot(x) >= rhs(i) - near)
            work.push_back(i);

    for (int pass = 0; pass < 4 * static_cast<int>(n + K) + 8; ++pass)
    {
        rvec z = y, lambda;
        if (!work.empty())
        {
            rmat C(static_cast<Eigen::Index>(work.size()), n);
            rvec d(C.rows());
            for (Eigen::Index r = 0; r < C.rows(); ++r)
            {
                C.row(r) = row(work[r]).transpose();
                d(r) = rhs(work[r]);
            }
            Eigen::CompleteOrthogonalDecomposition<rmat> cod(C * C.transpose());
            lambda = cod.solve(C * y - d);
            z = y - C.transpose() * lambda;
            Eigen::Index worst = -1;
            for (Eigen::Index r = 0; r < lambda.size(); ++r)
                if (lambda(r) < -tight && (worst < 0 || lambda(r) < lambda(worst)))
                    worst = r;
            if (worst >= 0)
            {
                work.erase(work.begin() + worst);
                continue;
            }
        }
        Eigen::Index add = -1;
        double viol = tight;
        for (Eigen::Index i = 0; i < n + K; ++i)
        {
            const double v = row(i).dot(z) - rhs(i);
            if (v > viol && std::find(work.begin(), work.end(), i) == work.end())
            {
                viol = v;
                add = i;
            }
        }
        if (add < 0)
            return z.cwiseMax(0.0);
        work.push_back(add);
    }
    return x;
}

} // namespace

rvec project_polytope(const rvec &y, const rmat &A, const rvec &b, int max_sweeps, double tol)
{
    const auto n = y.size();
    const auto K = A.rows();
    rvec x = y;
    // Dykstra: one correction vector per set (orthant + K half-spaces)
    rmat inc = rmat::Zero(n, K + 1);
    for (int sweep = 0; sweep < max_sweeps; ++sweep)
    {
        const rvec start = x;
        const rmat inc_start = inc;
        {
            rvec z = x + inc.col(0);
            rvec px = z.cwiseMax(0.0);
            inc.col(0) = z - px;
            x = px;
        }
        for (Eigen::Index k = 0; k < K; ++k)
        {
            rvec z = x + inc.col(k + 1);
            const double nn = A.row(k).squaredNorm();
            double viol = A.row(k).dot(z) - b(k);
            rvec px = z;
            if (viol > 0.0 && nn > 0.0)
                px -= (viol / nn) * A.row(k).transpose();
            inc.col(k + 1) = z - px;
            x = px;
        }
        const double sc = std::max(1.0, y.lpNorm<Eigen::Infinity>());
        if ((x - start).lpNorm<Eigen::Infinity>() <= tol * sc && (inc - inc_start).lpNorm<Eigen::Infinity>() <= tol * sc &&
            (A * x - b).maxCoeff() <= tol * std::max(1.0, b.lpNorm<Eigen::Infinity>()) && x.minCoeff() >= 0.0)
            break;
    }
    return polish_projection(y, A, b, x);
}

namespace
{

// Largest t <= 1 such that t*p is feasible; p itself must be nonnegative.
rvec pull_inside(rvec p, const rmat &A, const rvec &b)
{
    p = p.cwiseMax(0.0);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < A.rows(); ++k)
        worst = std::max(worst, A.row(k).dot(p) / b(k));
    if (worst > 1.0)
        p /= worst;
    return p;
}

PowerAllocation per_sensor(const Streams &s, const rmat &Phi_diag, const rvec &P, PowerRegime regime,
                           const SolverOptions &opt)
{
    const auto m = s.size();
    const auto K = Phi_diag.rows();
    if (Phi_diag.cols() != m || P.size() != K)
        throw ConfigError("per-sensor problem dimensions disagree");
    for (Eigen::Index k = 0; k < K; ++k)
        if (!(P(k) > 0.0))
            throw ConfigError("per-sensor budgets must be positive");

    // constraint matrix in watts, then in scaled variables u = p / scale
    rmat A = Phi_diag.array().rowwise() * s.w.transpose().array();
    rvec scale = rvec::Ones(m);
    std::vector<Eigen::Index> free;
    for (Eigen::Index l = 0; l < m; ++l)
    {
        double cap = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < K; ++k)
            if (A(k, l) > 0.0)
                cap = std::min(cap, P(k) / A(k, l));
        if (s.usable[l] && std::isfinite(cap))
        {
            scale(l) = cap;
            free.push_back(l);
        }
    }

    PowerAllocation out;
    out.regime = regime;
    out.p = rvec::Zero(m);
    if (free.empty())
        throw AllStreamsInactive("no stream can carry power");

    const auto n = static_cast<Eigen::Index>(free.size());
    rmat As(K, n);
    rvec sc(n);
    for (Eigen::Index j = 0; j < n; ++j)
    {
        sc(j) = scale(free[j]);
        As.col(j) = A.col(free[j]) * sc(j);
    }
    auto to_p = [&](const rvec &u) {
        rvec p = rvec::Zero(m);
        for (Eigen::Index j = 0; j < n; ++j)
            p(free[j]) = u(j) * sc(j);
        return p;
    };
    auto value = [&](const rvec &u) { return s.mse(to_p(u)); };
    auto grad = [&](const rvec &u) {
        const rvec g = s.gradient(to_p(u));
        rvec gu(n);
        for (Eigen::Index j = 0; j < n; ++j)
            gu(j) = g(free[j]) * sc(j);
        return gu;
    };
    auto proj = [&](const rvec &v) { return pull_inside(project_polytope(v, As, P), As, P); };
    auto residual = [&](const rvec &u, const rvec &g) { return (u - proj(u - g)).lpNorm<Eigen::Infinity>(); };

    // uniform feasible start
    rvec u = pull_inside(rvec::Ones(n), As, P);
    double f = value(u);
    rvec g = grad(u);
    double step = 1.0;
    double res = residual(u, g);
    int it = 0;
    while (res > opt.target)
    {
        if (it >= opt.max_iterations)
        {
            if (res <= opt.tolerance)
                break;
            throw NonConvergence("per-sensor power solver hit its iteration cap", res);
        }
        ++it;
        rvec x = proj(u - step * g);
        double fx = value(x);
        double t = step;
        // Armijo backtracking along the projection arc
        while (fx > f + 1e-4 * g.dot(x - u) && t > 1e-20)
        {
            t *= 0.5;
            x = proj(u - t * g);
            fx = value(x);
        }
        const rvec gx = grad(x);
        const rvec ds = x - u;
        const rvec dg = gx - g;
        const double sy = ds.dot(dg);
        step = sy > 0.0 ? std::clamp(ds.squaredNorm() / sy, 1e-10, 1e10) : std::min(2.0 * t, 1e10);
        if (ds.lpNorm<Eigen::Infinity>() == 0.0 || fx > f)
        {
            // no representable progress left; accept current point if nearly stationary
            res = residual(u, g);
            if (res > opt.tolerance)
                throw NonConvergence("per-sensor power solver stalled", res);
            break;
        }
        u = x;
        f = fx;
        g = gx;
        res = residual(u, g);
    }

    // the objective decreases in every stream, so push out until a budget binds
    double worst = 0.0;
    for (Eigen::Index k = 0; k < K; ++k)
        worst = std::max(worst, As.row(k).dot(u) / P(k));
    if (worst > 0.0)
        u /= worst;

    out.p = to_p(u);
    out.iterations = it;
    out.kkt_residual = res;
    return out;
}

} // namespace

PowerAllocation solve_per_sensor_noisy(const rvec &lambda_M, const rvec &sigma_G_sq, const rmat &Phi_diag,
                                       double sigma_n_sq, double sigma_v_sq, const rvec &P,
                                       const SolverOptions &opt)
{
    return per_sensor(noisy_streams(lambda_M, sigma_G_sq, sigma_n_sq, sigma_v_sq), Phi_diag, P,
                      PowerRegime::PerSensorNoisy, opt);
}

PowerAllocation solve_per_sensor_noiseless(const rvec &sigma_G_sq, const rmat &Phi_diag, double sigma_v_sq,
                                           const rvec &P, const SolverOptions &opt)
{
    return per_sensor(noiseless_streams(sigma_G_sq, sigma_v_sq), Phi_diag, P, PowerRegime::PerSensorNoiseless,
                      opt);
}

PowerAllocation allocate_power(const ChannelDecomposition &dec, const WsnConfig &cfg, PowerMode power)
{
    const rvec sg = dec.sigma_G_sq();
    const rvec lam = dec.lambda_M.head(dec.param_dim());
    const double sn2 = cfg.obs_noise_var;
    const double sv2 = cfg.fc_noise_var;
    const rvec P = Eigen::Map<const rvec>(cfg.sensor_power.data(), static_cast<Eigen::Index>(cfg.sensor_power.size()));
    switch (regime_for(power, cfg.observation_mode))
    {
    case PowerRegime::TotalNoisy:
        return waterfill_total_noisy(lam, sg, sn2, sv2, cfg.total_power);
    case PowerRegime::TotalNoiseless:
        return waterfill_total_noiseless(sg, sv2, cfg.total_power);
    case PowerRegime::PerSensorNoisy:
        return solve_per_sensor_noisy(lam, sg, sensor_coupling(dec).Phi_diag, sn2, sv2, P);
    case PowerRegime::PerSensorNoiseless:
        break;
    }
    return solve_per_sensor_noiseless(sg, sensor_coupling(dec).Phi_diag, sv2, P);
}

PrecoderSet assemble_digital_precoders(const PowerAllocation &alloc, const ChannelDecomposition &dec,
                                       const MeasurementModel &model, ObservationMode mode)
{
    const int m = dec.param_dim();
    if (alloc.p.size() != m)
        throw ConfigError("allocation length differs from m");
    PrecoderSet ps;
    ps.allocation = alloc;
    ps.Sigma = cmat::Zero(m, m);
    ps.Sigma.diagonal() = alloc.p.cwiseMax(0.0).cwiseSqrt().cast<cx>();
    for (int k = 0; k < model.num_sensors(); ++k)
    {
        const cmat &B = mode == ObservationMode::Noisy ? dec.U_M_k[k] : model.sensor_matrices[k];
        if (B.rows() < m || numerical_rank(B) < m)
            ps.structure_exact = false;
        ps.F_k.push_back(dec.V_g1_k[k] * ps.Sigma * pinv(B));
    }
    ps.F = block_diagonal(ps.F_k);
    return ps;
}

double transmit_power(const cmat &F, const MeasurementModel &model)
{
    return real_trace(F * model.observation_covariance() * F.adjoint());
}

double sensor_transmit_power(const cmat &F_k, const MeasurementModel &model, int k)
{
    return real_trace(F_k * model.sensor_observation_covariance(k) * F_k.adjoint());
}

std::vector<double> sensor_transmit_powers(const std::vector<cmat> &F_k, const MeasurementModel &model)
{
    std::vector<double> out;
    for (int k = 0; k < static_cast<int>(F_k.size()); ++k)
        out.push_back(sensor_transmit_power(F_k[k], model, k));
    return out;
}

std::vector<double> normalization_factors(const std::vector<cmat> &F_k, const MeasurementModel &model,
                                          const PowerConstraint &constraint)
{
    const auto powers = sensor_transmit_powers(F_k, model);
    std::vector<double> s(F_k.size(), 1.0);
    if (constraint.mode == PowerMode::TotalBudget)
    {
        const double total = pairwise_sum(powers);
        if (total > 0.0)
            s.assign(F_k.size(), std::sqrt(constraint.total / total));
        return s;
    }
    if (constraint.per_sensor.size() != F_k.size())
        throw ConfigError("per-sensor budget list has the wrong length");
    for (std::size_t k = 0; k < F_k.size(); ++k)
        if (powers[k] > 0.0)
            s[k] = std::sqrt(constraint.per_sensor[k] / powers[k]);
    return s;
}

std::vector<cmat> normalize_to_constraint(std::vector<cmat> F_k, const MeasurementModel &model,
                                          const PowerConstraint &constraint)
{
    const auto s = normalization_factors(F_k, model, constraint);
    for (std::size_t k = 0; k < F_k.size(); ++k)
        F_k[k] *= s[k];
    return F_k;
}

} // namespace mmwsn
