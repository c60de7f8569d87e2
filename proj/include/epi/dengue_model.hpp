/*
* Copyright (C) 2026 The epi-traj-opt Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef EPI_DENGUE_MODEL_HPP
#define EPI_DENGUE_MODEL_HPP

#include "epi/errors.hpp"
#include "epi/model_traits.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace epi
{

/**
 * Constants of the Dengue vector/host model with goodwill feedback.
 *
 * Defaults are the normalized values used for the one-year (52 week)
 * control study. Rates are per week.
 */
struct ParameterSet {
    double alpha_r = 0.20; ///< mosquito reproduction rate
    double alpha_m = 0.18; ///< mosquito mortality rate
    double beta    = 0.3; ///< contact rate, non-carrier mosquito x infected individual
    double eta     = 0.15; ///< treatment rate of infected individuals
    double mu      = 0.1; ///< seasonal amplitude of the reproduction rate
    double rho     = 0.1; ///< infection probability of individuals
    double theta   = 0.05; ///< fear factor
    double tau     = 0.1; ///< goodwill forgetting rate
    double phi     = 0.0; ///< seasonal phase [rad]
    double omega   = 2.0 * std::numbers::pi / 52.0; ///< seasonal angular frequency [rad/week]
    double p       = 1.0; ///< population in the risk area
    double gamma_d = 1.0; ///< cost weight of infected individuals
    double gamma_f = 0.4; ///< cost weight of insecticide
    double gamma_e = 0.8; ///< cost weight of educational campaigns
    double t_final = 52.0; ///< horizon [weeks]

    /// Throws ConfigError naming the first field that breaks the invariants.
    void validate() const;

    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

struct ParameterField {
    std::string_view name;
    double ParameterSet::*member;
};

/// All ParameterSet fields in declaration order; used for serialization and overrides.
inline constexpr std::array<ParameterField, 15> parameter_fields{{
    {"alpha_r", &ParameterSet::alpha_r},
    {"alpha_m", &ParameterSet::alpha_m},
    {"beta", &ParameterSet::beta},
    {"eta", &ParameterSet::eta},
    {"mu", &ParameterSet::mu},
    {"rho", &ParameterSet::rho},
    {"theta", &ParameterSet::theta},
    {"tau", &ParameterSet::tau},
    {"phi", &ParameterSet::phi},
    {"omega", &ParameterSet::omega},
    {"p", &ParameterSet::p},
    {"gamma_d", &ParameterSet::gamma_d},
    {"gamma_f", &ParameterSet::gamma_f},
    {"gamma_e", &ParameterSet::gamma_e},
    {"t_final", &ParameterSet::t_final},
}};

inline void ParameterSet::validate() const
{
    for (const auto& f : parameter_fields) {
        if (!std::isfinite(this->*f.member)) {
            throw ConfigError("parameter '" + std::string(f.name) + "' is not finite");
        }
        if (f.name != "phi" && this->*f.member < 0.0) {
            throw ConfigError("parameter '" + std::string(f.name) + "' must be nonnegative");
        }
    }
    if (mu > 1.0) {
        throw ConfigError("parameter 'mu' must lie in [0, 1]");
    }
    if (!(p > 0.0)) {
        throw ConfigError("parameter 'p' must be positive");
    }
    if (!(t_final > 0.0)) {
        throw ConfigError("parameter 't_final' must be positive");
    }
}

/**
 * Dengue epidemic dynamics augmented with the accumulated cost.
 *
 * States: x1 mosquito density, x2 virus-carrying mosquito density, x3 infected
 * individuals, x4 goodwill, x5 accumulated cost. Controls: u1 insecticide,
 * u2 educational campaigns.
 */
class DengueModel
{
public:
    static constexpr std::size_t kStates    = 5;
    static constexpr std::size_t kControls  = 2;
    static constexpr std::size_t kCostState = 4;

    static constexpr std::size_t kMosquitoes = 0;
    static constexpr std::size_t kCarriers   = 1;
    static constexpr std::size_t kInfected   = 2;
    static constexpr std::size_t kGoodwill   = 3;
    static constexpr std::size_t kCost       = 4;

    static constexpr std::size_t kInsecticide = 0;
    static constexpr std::size_t kCampaign    = 1;

    static constexpr std::array<std::string_view, kStates> state_names{"x1", "x2", "x3", "x4", "x5"};
    static constexpr std::array<std::string_view, kControls> control_names{"u1", "u2"};

    using State   = std::array<double, kStates>;
    using Control = std::array<double, kControls>;

    explicit DengueModel(ParameterSet params = {}, bool nonnegative_controls = true)
        : m_params(params)
        , m_nonnegative_controls(nonnegative_controls)
    {
        m_params.validate();
    }

    const ParameterSet& params() const
    {
        return m_params;
    }

    static State default_initial_state()
    {
        return {1.0, 0.12, 0.004, 0.05, 0.0};
    }

    /// alpha_r * (1 - mu * sin(omega t + phi)); bounded by alpha_r * (1 -/+ mu).
    double seasonal_reproduction(double t) const
    {
        return m_params.alpha_r * (1.0 - m_params.mu * std::sin(m_params.omega * t + m_params.phi));
    }

    template <class T>
    std::array<T, kStates> rhs(double t, const std::array<T, kStates>& x, const std::array<T, kControls>& u) const
    {
        const auto& q = m_params;
        const T growth = seasonal_reproduction(t) - q.alpha_m - x[kGoodwill];
        const T u1     = u[kInsecticide];
        const T u2     = u[kCampaign];
        return {
            growth * x[kMosquitoes] - u1,
            growth * x[kCarriers] + q.beta * (x[kMosquitoes] - x[kCarriers]) * x[kInfected] - u1,
            -q.eta * x[kInfected] + q.rho * x[kCarriers] * (q.p - x[kInfected]),
            -q.tau * x[kGoodwill] + q.theta * x[kInfected] + u2,
            q.gamma_d * x[kInfected] * x[kInfected] + q.gamma_f * u1 * u1 + q.gamma_e * u2 * u2,
        };
    }

    template <class T>
    T cost_rate(const std::array<T, kStates>& x, const std::array<T, kControls>& u) const
    {
        const auto& q = m_params;
        return q.gamma_d * x[kInfected] * x[kInfected] + q.gamma_f * u[kInsecticide] * u[kInsecticide] +
               q.gamma_e * u[kCampaign] * u[kCampaign];
    }

    ModelJacobian<kStates, kControls> jacobian(double t, const State& x, const Control& u) const
    {
        const auto& q      = m_params;
        const double growth = seasonal_reproduction(t) - q.alpha_m - x[kGoodwill];
        ModelJacobian<kStates, kControls> j;
        auto& a = j.dfdx;
        auto& b = j.dfdu;

        a(0, kMosquitoes) = growth;
        a(0, kGoodwill)   = -x[kMosquitoes];

        a(1, kMosquitoes) = q.beta * x[kInfected];
        a(1, kCarriers)   = growth - q.beta * x[kInfected];
        a(1, kInfected)   = q.beta * (x[kMosquitoes] - x[kCarriers]);
        a(1, kGoodwill)   = -x[kCarriers];

        a(2, kCarriers) = q.rho * (q.p - x[kInfected]);
        a(2, kInfected) = -q.eta - q.rho * x[kCarriers];

        a(3, kInfected) = q.theta;
        a(3, kGoodwill) = -q.tau;

        a(4, kInfected) = 2.0 * q.gamma_d * x[kInfected];

        b(0, kInsecticide) = -1.0;
        b(1, kInsecticide) = -1.0;
        b(3, kCampaign)    = 1.0;
        b(4, kInsecticide) = 2.0 * q.gamma_f * u[kInsecticide];
        b(4, kCampaign)    = 2.0 * q.gamma_e * u[kCampaign];
        return j;
    }

    Control control_lower_bounds() const
    {
        const double lo = m_nonnegative_controls ? 0.0 : -std::numeric_limits<double>::infinity();
        return {lo, lo};
    }

    Control control_upper_bounds() const
    {
        return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }

private:
    ParameterSet m_params;
    bool m_nonnegative_controls;
};

static_assert(OptimalControlModel<DengueModel>);

namespace detail
{
inline void require_finite(double v, std::string_view name)
{
    if (!std::isfinite(v)) {
        throw DomainError("non-finite input '" + std::string(name) + "'");
    }
}

inline void require_finite_inputs(double t, const DengueModel::State& s, const DengueModel::Control& c)
{
    require_finite(t, "t");
    for (std::size_t i = 0; i < s.size(); ++i) {
        require_finite(s[i], DengueModel::state_names[i]);
    }
    for (std::size_t j = 0; j < c.size(); ++j) {
        require_finite(c[j], DengueModel::control_names[j]);
    }
}
} // namespace detail

/// Checked right-hand side (x1', ..., x5'). Throws DomainError on non-finite input.
inline DengueModel::State dynamics(double t, const DengueModel::State& s, const DengueModel::Control& c,
                                   const ParameterSet& p)
{
    detail::require_finite_inputs(t, s, c);
    return DengueModel(p).rhs(t, s, c);
}

/// gamma_d x3^2 + gamma_f u1^2 + gamma_e u2^2; equals the x5 component of dynamics().
inline double cost_integrand(const DengueModel::State& s, const DengueModel::Control& c, const ParameterSet& p)
{
    detail::require_finite_inputs(0.0, s, c);
    return DengueModel(p).cost_rate(s, c);
}

inline ModelJacobian<5, 2> dynamics_jacobian(double t, const DengueModel::State& s, const DengueModel::Control& c,
                                             const ParameterSet& p)
{
    detail::require_finite_inputs(t, s, c);
    return DengueModel(p).jacobian(t, s, c);
}

/// Human-readable list of model-intent violations (x2 <= x1, 0 <= x3 <= p, nonnegative densities).
inline std::vector<std::string> model_intent_violations(const DengueModel::State& s, const ParameterSet& p,
                                                        double slack = 0.0)
{
    std::vector<std::string> out;
    if (s[1] > s[0] + slack) {
        out.emplace_back("x2 > x1");
    }
    if (s[2] < -slack || s[2] > p.p + slack) {
        out.emplace_back("x3 outside [0, p]");
    }
    for (std::size_t i : {0u, 1u, 3u, 4u}) {
        if (s[i] < -slack) {
            out.push_back(std::string(DengueModel::state_names[i]) + " < 0");
        }
    }
    return out;
}

} // namespace epi

#endif // EPI_DENGUE_MODEL_HPP
