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
#ifndef EPI_ERRORS_HPP
#define EPI_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epi
{

/// Invalid numerical input to a model or evaluation routine (non-finite value, size mismatch).
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// Invalid user-supplied configuration (parameters, grid, solver settings).
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A forward simulation produced a non-finite or out-of-range state.
class DivergenceError : public std::runtime_error
{
public:
    DivergenceError(std::size_t step, const std::string& what)
        : std::runtime_error("divergence at step " + std::to_string(step) + ": " + what)
        , m_step(step)
    {
    }

    std::size_t step() const noexcept
    {
        return m_step;
    }

private:
    std::size_t m_step;
};

} // namespace epi

#endif // EPI_ERRORS_HPP
