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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "proba/losses.h"
#include "proba/metrics.h"
#include "proba/optimizer.h"
#include "proba/problem.h"

namespace proba {

using Json = nlohmann::json;

// ---------------------------------------------------------------- scenes

struct SceneMeta {
  std::string generator = "unknown";
  std::uint64_t seed = 0;
  std::string units = "pixels";
};

struct SceneFile {
  SceneProblem problem;
  SceneMeta meta;
};

// Poses are written as 3x4 row-major world-to-camera matrices.
Json SceneToJson(const SceneProblem& problem, const SceneMeta& meta = {});
// Validation errors (InvalidInput) carry the JSON pointer of the offending
// value, e.g. "/correspondences/3/qx".
SceneFile SceneFromJson(const Json& doc, ParameterOptions options = {});

void WriteScene(const std::filesystem::path& path, const SceneProblem& problem,
                const SceneMeta& meta = {});
SceneFile ReadScene(const std::filesystem::path& path,
                    ParameterOptions options = {});

// Restricts a scene to `frames` (in that order) and renumbers them
// 0..n-1; correspondences touching other frames are dropped.
SceneProblem SubsetScene(const SceneProblem& problem,
                         const std::vector<int>& frames);

// Indices of n evaluation frames drawn from a pool of 10, following a fixed
// near-uniform table. Throws OutOfRange unless 2 <= n <= 10.
std::vector<int> SelectEvalFrames(int n);

// ---------------------------------------------------------- dense matches

struct DenseMatch {
  int i = 0;
  int j = 0;
  double px = 0.0;
  double py = 0.0;
  double qx = 0.0;
  double qy = 0.0;
  double conf = 1.0;

  bool operator==(const DenseMatch&) const = default;
};

// One JSON object per line. Throws InvalidInput with the line number.
std::vector<DenseMatch> ParseDenseMatches(const std::string& text);
std::vector<DenseMatch> ReadDenseMatches(const std::filesystem::path& path);
std::string DenseMatchesToText(const std::vector<DenseMatch>& matches);

// Keeps records whose source pixel lies on the grid {0, s, 2s, ...}^2 and
// whose confidence is strictly above conf_floor. Idempotent.
std::vector<DenseMatch> SampleDense(const std::vector<DenseMatch>& matches,
                                    int stride = 16, double conf_floor = 0.01);

// SampleDense followed by conversion; throws EmptyAfterSampling when
// nothing survives.
std::vector<Correspondence> SampleCorrespondences(
    const std::vector<DenseMatch>& matches, int stride = 16,
    double conf_floor = 0.01);

// ------------------------------------------------------------ run config

struct RunConfig {
  LossConfig loss;
  OptimizerConfig optimizer;
  ParameterOptions parameters;
  InitOptions init;
  std::vector<std::uint64_t> seeds = {0};
  std::string scene_path;
  std::string output_dir = ".";
};

// Schema check with JSON-pointer paths in error messages. Unknown keys are
// rejected so that typos do not silently fall back to defaults.
RunConfig RunConfigFromJson(const Json& doc);
Json RunConfigToJson(const RunConfig& config);

// ------------------------------------------------------- traces, results

inline constexpr const char* kTraceHeader =
    "iteration,total,reproj,bha,rra5,rra10,rra15,rta5,rta10,rta15,maa5,maa10,"
    "maa15,fov_err,ms";

// One row per snapshot. Metric columns are empty without ground truth.
std::string TraceToCsv(const Trace& trace);
void WriteTraceCsv(const std::filesystem::path& path, const Trace& trace);

Json MetricsToJson(const MetricSummary& summary);
MetricSummary MetricsFromJson(const Json& doc);

Json PoseToJson(const Pose& pose);
Pose PoseFromJson(const Json& doc, const std::string& where);

// Final parameters (poses, fov), losses, status and run settings.
Json ResultToJson(const OptimizeResult& result, const RunConfig& config,
                  std::uint64_t seed, const LossReport& final_loss);
// Reads the pose and fov estimates of a result document.
struct ResultEstimate {
  std::vector<Pose> poses;
  std::vector<double> fov_deg;
};
ResultEstimate ResultEstimateFromJson(const Json& doc);

// Metric summary of an estimate against the ground truth in `problem`.
MetricSummary EvaluateEstimate(const SceneProblem& problem,
                               const ResultEstimate& estimate);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

// ------------------------------------------------------------------ plot

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable ParseCsv(const std::string& text);

// Multi-series line chart of `columns` against the first column.
std::string TraceToSvg(const CsvTable& table,
                       const std::vector<std::string>& columns,
                       const std::string& title = "");

}  // namespace proba
