// Copyright 2026 The ProBA Authors.
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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proba/io.h"
#include "proba/losses.h"
#include "proba/metrics.h"
#include "proba/optimizer.h"
#include "proba/problem.h"

namespace proba {

struct RunOutcome {
  OptimizeResult result;
  LossReport final_loss;
  std::optional<MetricSummary> metrics;
};

// Initializes from `seed` and optimizes. The problem must have been built
// with config.parameters.
RunOutcome RunSeed(const SceneProblem& problem, const RunConfig& config,
                   std::uint64_t seed, const ObjectiveOptions& options = {},
                   const SnapshotCallback& callback = {});

struct SweepRow {
  double key = 0.0;
  int runs = 0;
  int aborted = 0;
  MetricSummary mean;  // over seeds with metrics
  std::vector<MetricSummary> per_seed;
};

// One row per lambda, averaged over config.seeds.
std::vector<SweepRow> SweepLambda(const SceneProblem& problem,
                                  const RunConfig& config,
                                  const std::vector<double>& lambdas);

// One row per n in [n_min, n_max]: the first ten frames of `pool` are
// reduced to SelectEvalFrames(n) and optimized for every seed.
std::vector<SweepRow> SweepFrames(const SceneProblem& pool,
                                  const RunConfig& config, int n_min = 2,
                                  int n_max = 10);

std::string SweepToCsv(const std::vector<SweepRow>& rows,
                       const std::string& key_name);

}  // namespace proba
