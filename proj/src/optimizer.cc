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

#include "proba/optimizer.h"

#include <chrono>
#include <cmath>

namespace proba {

void OptimizerConfig::Validate() const {
  if (!(lr_fov_depth > 0.0) || !(lr_pose_radius > 0.0)) {
    throw Error(ErrorCode::kOutOfRange, "learning rates must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "betas must lie in [0, 1)");
  }
  if (!(eps > 0.0) || !(weight_decay >= 0.0)) {
    throw Error(ErrorCode::kOutOfRange, "eps must be positive, decay >= 0");
  }
  if (iterations < 0) {
    throw Error(ErrorCode::kOutOfRange, "iterations must be non-negative");
  }
  if (trace_every < 1) {
    throw Error(ErrorCode::kOutOfRange, "trace_every must be at least 1");
  }
}

double OptimizerConfig::LearningRate(ParamGroup group) const {
  switch (group) {
    case ParamGroup::kPose:
    case ParamGroup::kRadius:
      return lr_pose_radius;
    case ParamGroup::kFov:
    case ParamGroup::kDepth:
      return lr_fov_depth;
  }
  return lr_fov_depth;
}

void AdamWStep(AdamState* state, std::span<double> params,
               std::span<const double> grad,
               const std::vector<ParamGroup>& tags,
               const OptimizerConfig& config, kernels::Isa isa) {
  const std::size_t n = params.size();
  if (grad.size() != n || tags.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "params, grad and tags differ in length");
  }
  if (state->m.empty() && state->v.empty()) {
    state->m.assign(n, 0.0);
    state->v.assign(n, 0.0);
  }
  if (state->m.size() != n || state->v.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "optimizer state does not match the parameter count");
  }
  ++state->step;
  kernels::AdamCoefficients c;
  c.beta1 = config.beta1;
  c.beta2 = config.beta2;
  c.eps = config.eps;
  c.weight_decay = config.weight_decay;
  c.bias_correction1 = 1.0 - std::pow(config.beta1, state->step);
  c.bias_correction2 = 1.0 - std::pow(config.beta2, state->step);
  std::size_t begin = 0;
  while (begin < n) {
    std::size_t end = begin + 1;
    while (end < n && tags[end] == tags[begin]) ++end;
    c.lr = config.LearningRate(tags[begin]);
    const std::size_t len = end - begin;
    kernels::AdamUpdate(isa, params.subspan(begin, len),
                        std::span<double>(state->m).subspan(begin, len),
                        std::span<double>(state->v).subspan(begin, len),
                        grad.subspan(begin, len), c);
    begin = end;
  }
}

OptimizeResult Optimize(const SceneProblem& problem, const ParameterBlock& init,
                        const LossConfig& loss, const OptimizerConfig& config,
                        const ObjectiveOptions& objective_options,
                        const SnapshotCallback& callback) {
  config.Validate();
  if (!(init.layout == problem.Layout()) ||
      init.values.size() != init.layout.Size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "initial parameters do not match the problem layout");
  }
  Objective objective(problem, loss, objective_options);
  const std::vector<ParamGroup> tags = init.layout.GroupTags();
  const bool with_gt = problem.HasGroundTruth();
  const auto start = std::chrono::steady_clock::now();

  OptimizeResult result;
  result.params = init;
  std::vector<double>& theta = result.params.values;
  std::vector<double> grad(theta.size());
  AdamState state;

  for (int it = 0; it <= config.iterations; ++it) {
    LossReport report;
    try {
      report = objective.Evaluate(theta, grad);
    } catch (const Error& e) {
      if (!e.IsNumerical()) throw;
      result.aborted = true;
      result.abort_code = e.code();
      result.abort_message = e.what();
      return result;
    }
    const bool snapshot = it == 0 || it == config.iterations ||
                          it % config.trace_every == 0;
    if (snapshot) {
      TraceRow row;
      row.iteration = it;
      row.total = report.total;
      row.reproj = report.reproj;
      row.bha = report.bha;
      if (with_gt) row.metrics = EvaluateMetrics(problem, result.params);
      if (config.wallclock) {
        row.ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
      }
      result.trace.rows.push_back(row);
      if (callback) callback(row);
    }
    if (it == config.iterations) break;
    AdamWStep(&state, theta, grad, tags, config, objective_options.isa);
    result.iterations_done = it + 1;
  }
  return result;
}

}  // namespace proba
