// Copyright 2026 The Alloc Arena Authors.
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

#include "alloc_arena/config.hpp"
#include "alloc_arena/coverage.hpp"
#include "alloc_arena/env.hpp"
#include "alloc_arena/error.hpp"
#include "alloc_arena/estimation.hpp"
#include "alloc_arena/harness.hpp"
#include "alloc_arena/lagrangian.hpp"
#include "alloc_arena/rl_agent.hpp"
#include "alloc_arena/rng.hpp"
#include "alloc_arena/stats.hpp"
#include "alloc_arena/strategies.hpp"
#include "alloc_arena/svg.hpp"
