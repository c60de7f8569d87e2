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
#include "epi/dual.hpp"

#include <gtest/gtest.h>

#include <cmath>

using D2 = epi::Dual<2>;

TEST(Dual, ArithmeticPropagatesDerivatives)
{
    const auto x = D2::make_variable(3.0, 0);
    const auto y = D2::make_variable(2.0, 1);
    const auto f = x * y + x / y - 2.0 * x + 1.0;
    EXPECT_DOUBLE_EQ(f.v, 3.0 * 2.0 + 1.5 - 6.0 + 1.0);
    EXPECT_DOUBLE_EQ(f.d[0], 2.0 + 0.5 - 2.0);
    EXPECT_DOUBLE_EQ(f.d[1], 3.0 - 3.0 / 4.0);
}

TEST(Dual, ElementaryFunctions)
{
    const auto x = D2::make_variable(0.7, 0);
    EXPECT_DOUBLE_EQ(sin(x).d[0], std::cos(0.7));
    EXPECT_DOUBLE_EQ(cos(x).d[0], -std::sin(0.7));
    EXPECT_DOUBLE_EQ(exp(x).d[0], std::exp(0.7));
    EXPECT_DOUBLE_EQ(sqrt(x).d[0], 0.5 / std::sqrt(0.7));
    EXPECT_DOUBLE_EQ(sin(x).d[1], 0.0);
}

TEST(Dual, ConstantsCarryNoDerivative)
{
    const D2 c(4.0);
    const auto x = D2::make_variable(1.5, 1);
    const auto f = c * x - c;
    EXPECT_DOUBLE_EQ(f.d[0], 0.0);
    EXPECT_DOUBLE_EQ(f.d[1], 4.0);
    EXPECT_DOUBLE_EQ(epi::value_of(f), 2.0);
    EXPECT_DOUBLE_EQ(epi::value_of(2.5), 2.5);
}

TEST(Dual, CompoundAssignmentAndNegation)
{
    auto x = D2::make_variable(2.0, 0);
    x *= x;
    x -= 1.0;
    x /= D2(3.0);
    EXPECT_DOUBLE_EQ(x.v, 1.0);
    EXPECT_DOUBLE_EQ(x.d[0], 4.0 / 3.0);
    const auto n = -x;
    EXPECT_DOUBLE_EQ(n.d[0], -4.0 / 3.0);
    const auto q = 1.0 / D2::make_variable(4.0, 0);
    EXPECT_DOUBLE_EQ(q.d[0], -1.0 / 16.0);
}
