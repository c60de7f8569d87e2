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
#ifndef EPI_DUAL_HPP
#define EPI_DUAL_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace epi
{

/**
 * Forward-mode dual number carrying N directional derivatives.
 *
 * Only the operations needed by the model right-hand sides are provided:
 * arithmetic with other duals and with plain doubles, plus a handful of
 * elementary functions. Seed with make_variable() and read derivatives from
 * the `d` array.
 */
template <std::size_t N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    constexpr Dual() = default;
    constexpr Dual(double value) // NOLINT(google-explicit-constructor)
        : v(value)
    {
    }

    static constexpr Dual make_variable(double value, std::size_t direction)
    {
        Dual r(value);
        r.d[direction] = 1.0;
        return r;
    }

    constexpr Dual& operator+=(const Dual& o)
    {
        v += o.v;
        for (std::size_t i = 0; i < N; ++i) {
            d[i] += o.d[i];
        }
        return *this;
    }
    constexpr Dual& operator-=(const Dual& o)
    {
        v -= o.v;
        for (std::size_t i = 0; i < N; ++i) {
            d[i] -= o.d[i];
        }
        return *this;
    }
    constexpr Dual& operator*=(const Dual& o)
    {
        for (std::size_t i = 0; i < N; ++i) {
            d[i] = d[i] * o.v + v * o.d[i];
        }
        v *= o.v;
        return *this;
    }
    constexpr Dual& operator/=(const Dual& o)
    {
        const double inv = 1.0 / o.v;
        for (std::size_t i = 0; i < N; ++i) {
            d[i] = (d[i] - v * inv * o.d[i]) * inv;
        }
        v *= inv;
        return *this;
    }
};

template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a)
{
    a.v = -a.v;
    for (auto& x : a.d) {
        x = -x;
    }
    return a;
}

template <std::size_t N>
constexpr Dual<N> operator+(Dual<N> a, const Dual<N>& b)
{
    return a += b;
}
template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a, const Dual<N>& b)
{
    return a -= b;
}
template <std::size_t N>
constexpr Dual<N> operator*(Dual<N> a, const Dual<N>& b)
{
    return a *= b;
}
template <std::size_t N>
constexpr Dual<N> operator/(Dual<N> a, const Dual<N>& b)
{
    return a /= b;
}

template <std::size_t N>
constexpr Dual<N> operator+(Dual<N> a, double b)
{
    a.v += b;
    return a;
}
template <std::size_t N>
constexpr Dual<N> operator+(double a, Dual<N> b)
{
    b.v += a;
    return b;
}
template <std::size_t N>
constexpr Dual<N> operator-(Dual<N> a, double b)
{
    a.v -= b;
    return a;
}
template <std::size_t N>
constexpr Dual<N> operator-(double a, const Dual<N>& b)
{
    return Dual<N>(a) - b;
}
template <std::size_t N>
constexpr Dual<N> operator*(Dual<N> a, double b)
{
    a.v *= b;
    for (auto& x : a.d) {
        x *= b;
    }
    return a;
}
template <std::size_t N>
constexpr Dual<N> operator*(double a, const Dual<N>& b)
{
    return b * a;
}
template <std::size_t N>
constexpr Dual<N> operator/(const Dual<N>& a, double b)
{
    return a * (1.0 / b);
}
template <std::size_t N>
constexpr Dual<N> operator/(double a, const Dual<N>& b)
{
    return Dual<N>(a) / b;
}

template <std::size_t N>
Dual<N> sin(const Dual<N>& a)
{
    Dual<N> r(std::sin(a.v));
    const double c = std::cos(a.v);
    for (std::size_t i = 0; i < N; ++i) {
        r.d[i] = c * a.d[i];
    }
    return r;
}

template <std::size_t N>
Dual<N> cos(const Dual<N>& a)
{
    Dual<N> r(std::cos(a.v));
    const double s = -std::sin(a.v);
    for (std::size_t i = 0; i < N; ++i) {
        r.d[i] = s * a.d[i];
    }
    return r;
}

template <std::size_t N>
Dual<N> exp(const Dual<N>& a)
{
    Dual<N> r(std::exp(a.v));
    for (std::size_t i = 0; i < N; ++i) {
        r.d[i] = r.v * a.d[i];
    }
    return r;
}

template <std::size_t N>
Dual<N> sqrt(const Dual<N>& a)
{
    Dual<N> r(std::sqrt(a.v));
    const double half_inv = 0.5 / r.v;
    for (std::size_t i = 0; i < N; ++i) {
        r.d[i] = half_inv * a.d[i];
    }
    return r;
}

/// Value part of a scalar that may or may not be a dual number.
inline double value_of(double x)
{
    return x;
}
template <std::size_t N>
double value_of(const Dual<N>& x)
{
    return x.v;
}

} // namespace epi

#endif // EPI_DUAL_HPP
