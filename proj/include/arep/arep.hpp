// Copyright 2026 the arep authors.
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

#include "arep/arch_model.hpp"
#include "arep/errors.hpp"
#include "arep/estimators.hpp"
#include "arep/innovations.hpp"
#include "arep/maxineq_lab.hpp"
#include "arep/mixing_lab.hpp"
#include "arep/parallel.hpp"
#include "arep/params.hpp"
#include "arep/rep_engine.hpp"
#include "arep/report.hpp"
#include "arep/rng.hpp"
#include "arep/robustness_lab.hpp"
#include "arep/stats.hpp"
