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
#ifndef EPI_EPI_HPP
#define EPI_EPI_HPP

#include "epi/box_lbfgs.hpp"
#include "epi/dengue_model.hpp"
#include "epi/dual.hpp"
#include "epi/errors.hpp"
#include "epi/integrator.hpp"
#include "epi/json_io.hpp"
#include "epi/metrics.hpp"
#include "epi/model_traits.hpp"
#include "epi/scenario.hpp"
#include "epi/solver.hpp"
#include "epi/trajectory_io.hpp"
#include "epi/transcription.hpp"
#include "epi/verification/acceptance.hpp"
#include "epi/verification/finite_difference.hpp"

#endif // EPI_EPI_HPP
