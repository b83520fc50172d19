// Copyright 2026 The cylsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "cylsim/angles.hpp"
#include "cylsim/cylinder.hpp"
#include "cylsim/error.hpp"
#include "cylsim/experiments.hpp"
#include "cylsim/parallel.hpp"
#include "cylsim/report.hpp"
#include "cylsim/rng.hpp"
#include "cylsim/sources.hpp"
#include "cylsim/statistics.hpp"
