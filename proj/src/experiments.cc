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

#include "proba/experiments.h"

#include <cstdio>

#include "proba/error.h"

namespace proba {
namespace {

SweepRow Aggregate(double key, const std::vector<RunOutcome>& runs) {
  SweepRow row;
  row.key = key;
  row.runs = static_cast<int>(runs.size());
  for (const RunOutcome& r : runs) {
    row.aborted += r.result.aborted;
    if (r.metrics) row.per_seed.push_back(*r.metrics);
  }
  const double n = static_cast<double>(row.per_seed.size());
  for (const MetricSummary& m : row.per_seed) {
    for (int k = 0; k < 3; ++k) {
      row.mean.rra[k] += m.rra[k] / n;
      row.mean.rta[k] += m.rta[k] / n;
      row.mean.maa[k] += m.maa[k] / n;
    }
    row.mean.fov_error += m.fov_error / n;
  }
  return row;
}

}  // namespace

RunOutcome RunSeed(const SceneProblem& problem, const RunConfig& config,
                   std::uint64_t seed, const ObjectiveOptions& options,
                   const SnapshotCallback& callback) {
  if (!(problem.options().anisotropic == config.parameters.anisotropic &&
        problem.options().per_frame_fov == config.parameters.per_frame_fov)) {
    throw Error(ErrorCode::kInvalidInput,
                "scene parameter options differ from the run config");
  }
  const ParameterBlock init = Initialize(problem, seed, config.init);
  OptimizerConfig oc = config.optimizer;
  oc.seed = seed;
  RunOutcome out;
  out.result = Optimize(problem, init, config.loss, oc, options, callback);
  if (!out.result.aborted) {
    Objective objective(problem, config.loss, options);
    out.final_loss = objective.Evaluate(out.result.params.values, {});
  }
  if (problem.HasGroundTruth()) {
    out.metrics = EvaluateMetrics(problem, out.result.params);
  }
  return out;
}

std::vector<SweepRow> SweepLambda(const SceneProblem& problem,
                                  const RunConfig& config,
                                  const std::vector<double>& lambdas) {
  std::vector<SweepRow> rows;
  for (double lambda : lambdas) {
    if (lambda < 0.0) throw Error(ErrorCode::kOutOfRange, "lambda must be >= 0");
    RunConfig rc = config;
    rc.loss.lambda = lambda;
    std::vector<RunOutcome> runs;
    for (std::uint64_t seed : rc.seeds) runs.push_back(RunSeed(problem, rc, seed));
    rows.push_back(Aggregate(lambda, runs));
  }
  return rows;
}

std::vector<SweepRow> SweepFrames(const SceneProblem& pool,
                                  const RunConfig& config, int n_min,
                                  int n_max) {
  if (pool.num_frames() < 10) {
    throw Error(ErrorCode::kInvalidInput, "frame sweep needs a pool of 10 frames");
  }
  if (n_min < 2 || n_max > 10 || n_min > n_max) {
    throw Error(ErrorCode::kOutOfRange, "frame counts must satisfy 2 <= min <= max <= 10");
  }
  std::vector<SweepRow> rows;
  for (int n = n_min; n <= n_max; ++n) {
    const SceneProblem sub = SubsetScene(pool, SelectEvalFrames(n));
    std::vector<RunOutcome> runs;
    for (std::uint64_t seed : config.seeds) runs.push_back(RunSeed(sub, config, seed));
    rows.push_back(Aggregate(n, runs));
  }
  return rows;
}

std::string SweepToCsv(const std::vector<SweepRow>& rows,
                       const std::string& key_name) {
  std::string out = key_name +
                    ",runs,aborted,rra5,rra10,rra15,rta5,rta10,rta15,maa5,"
                    "maa10,maa15,fov_err\n";
  char buf[64];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6g,%d,%d", r.key, r.runs, r.aborted);
    out += buf;
    for (const auto* arr : {&r.mean.rra, &r.mean.rta, &r.mean.maa}) {
      for (double v : *arr) {
        std::snprintf(buf, sizeof(buf), ",%.6g", v);
        out += buf;
      }
    }
    std::snprintf(buf, sizeof(buf), ",%.6g\n", r.mean.fov_error);
    out += buf;
  }
  return out;
}

}  // namespace proba
