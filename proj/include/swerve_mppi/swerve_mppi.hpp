// Copyright 2026 The swerve_mppi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "swerve_mppi/config.hpp"
#include "swerve_mppi/counter_rng.hpp"
#include "swerve_mppi/episode.hpp"
#include "swerve_mppi/hybrid.hpp"
#include "swerve_mppi/jacobian.hpp"
#include "swerve_mppi/kinematics.hpp"
#include "swerve_mppi/mppi.hpp"
#include "swerve_mppi/planner.hpp"
#include "swerve_mppi/world.hpp"
