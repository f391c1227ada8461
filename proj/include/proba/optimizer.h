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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proba/error.h"
#include "proba/kernels/kernel.h"
#include "proba/losses.h"
#include "proba/metrics.h"
#include "proba/problem.h"

namespace proba {

struct OptimizerConfig {
  double lr_fov_depth = 1e-3;
  double lr_pose_radius = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  int iterations = 10000;
  int trace_every = 100;
  std::uint64_t seed = 0;
  // Record elapsed wall-clock time in traces. Off by default so traces stay
  // byte-identical between runs.
  bool wallclock = false;

  // Throws OutOfRange on invalid values.
  void Validate() const;
  double LearningRate(ParamGroup group) const;
};

struct TraceRow {
  int iteration = 0;
  double total = 0.0;
  double reproj = 0.0;
  double bha = 0.0;
  std::optional<MetricSummary> metrics;  // present with ground truth
  double ms = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  int step = 0;
};

// One decoupled-weight-decay Adam step. Each coordinate uses the learning
// rate of its tag. Throws DimensionMismatch when sizes disagree.
void AdamWStep(AdamState* state, std::span<double> params,
               std::span<const double> grad,
               const std::vector<ParamGroup>& tags,
               const OptimizerConfig& config,
               kernels::Isa isa = kernels::ActiveIsa());

struct OptimizeResult {
  ParameterBlock params;
  Trace trace;
  bool aborted = false;
  std::optional<ErrorCode> abort_code;
  std::string abort_message;
  int iterations_done = 0;
};

// Optional per-snapshot hook, e.g. for progress output.
using SnapshotCallback = std::function<void(const TraceRow&)>;

// Runs exactly config.iterations full-batch steps from `init`. Snapshots
// are taken at iteration 0, every trace_every iterations and at the end.
// Numerical failures stop the run and are reported in the result together
// with the trace so far.
OptimizeResult Optimize(const SceneProblem& problem, const ParameterBlock& init,
                        const LossConfig& loss, const OptimizerConfig& config,
                        const ObjectiveOptions& objective_options = {},
                        const SnapshotCallback& callback = {});

}  // namespace proba
