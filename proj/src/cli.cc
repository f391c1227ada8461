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

#include "proba/cli.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "proba/error.h"
#include "proba/experiments.h"
#include "proba/io.h"
#include "proba/synthgen.h"

namespace proba {
namespace {

namespace fs = std::filesystem;

template <class T>
std::vector<T> ParseList(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      if constexpr (std::is_floating_point_v<T>) {
        out.push_back(static_cast<T>(std::stod(item, &used)));
      } else {
        const long long v = std::stoll(item, &used);
        if (v < 0) throw std::invalid_argument("negative");
        out.push_back(static_cast<T>(v));
      }
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidInput,
                  what + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidInput, what + ": empty list");
  return out;
}

// Synthetic-scene flags shared by `synth` and `sweep-frames`.
struct SynthFlags {
  SynthConfig config;
  std::string rig = "orbit";

  void Add(CLI::App* app, bool with_frames) {
    if (with_frames) {
      app->add_option("--frames", config.n_frames, "number of cameras");
    }
    app->add_option("--points", config.n_points, "number of 3D points");
    app->add_option("--fov", config.fov_gt, "ground-truth horizontal fov (deg)");
    app->add_option("--width", config.width, "image width (px)");
    app->add_option("--height", config.height, "image height (px)");
    app->add_option("--rig", rig, "orbit | forward_walk");
    app->add_option("--baseline", config.baseline,
                    "orbit: degrees between cameras; walk: step x 100");
    app->add_option("--distance", config.camera_distance,
                    "camera distance from the scene center");
    app->add_option("--noise", config.pixel_noise_std, "pixel noise std (px)");
    app->add_option("--outliers", config.outlier_rate, "outlier fraction");
    app->add_option("--outlier-radius", config.outlier_radius,
                    "max outlier displacement (px)");
  }
  SynthConfig Build(std::uint64_t seed) {
    SynthConfig c = config;
    c.rig = ParseRig(rig);
    c.seed = seed;
    return c;
  }
};

// Optimization flags; explicit flags override values from --config.
struct RunFlags {
  std::string config_path;
  std::string scene;
  std::string mode;
  double lambda = 1.0;
  double eta = 0.05;
  int iters = 10000;
  int trace_every = 100;
  std::string seeds;
  bool anisotropic = false;
  bool per_frame_fov = false;
  bool asymmetric = false;
  bool use_confidence = false;
  bool wallclock = false;
  std::map<std::string, CLI::Option*> opts;

  void Add(CLI::App* app, bool with_scene) {
    opts["config"] = app->add_option("--config", config_path, "run config JSON");
    if (with_scene) {
      opts["scene"] = app->add_option("--scene", scene, "scene JSON");
    }
    opts["mode"] = app->add_option("--mode", mode, "proba | ba | pose | expose");
    opts["lambda"] = app->add_option("--lambda", lambda, "Bhattacharyya weight");
    opts["eta"] = app->add_option("--eta", eta, "pOSE blend weight");
    opts["iters"] = app->add_option("--iters", iters, "iterations");
    opts["trace"] = app->add_option("--trace-every", trace_every,
                                    "iterations between snapshots");
    opts["seeds"] = app->add_option("--seed,--seeds", seeds,
                                    "init seed or comma-separated seeds");
    opts["aniso"] = app->add_flag("--anisotropic", anisotropic,
                                  "oriented ellipsoid radii");
    opts["pff"] = app->add_flag("--per-frame-fov", per_frame_fov,
                                "one fov per frame");
    opts["asym"] = app->add_flag("--asymmetric", asymmetric,
                                 "only reproject p into frame j");
    opts["conf"] = app->add_flag("--use-confidence", use_confidence,
                                 "weight residuals by match confidence");
    opts["wall"] = app->add_flag("--wallclock", wallclock,
                                 "record wall-clock ms in traces");
  }

  bool Given(const std::string& key) const {
    auto it = opts.find(key);
    return it != opts.end() && it->second->count() > 0;
  }

  RunConfig Build() const {
    RunConfig rc;
    if (!config_path.empty()) {
      const std::string text = ReadTextFile(config_path);
      Json doc;
      try {
        doc = Json::parse(text);
      } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::kInvalidInput,
                    config_path + ": malformed JSON: " + e.what());
      }
      try {
        rc = RunConfigFromJson(doc);
      } catch (const Error& e) {
        throw Error(e.code(), config_path + " " + e.what());
      }
    }
    if (Given("scene")) rc.scene_path = scene;
    if (rc.scene_path.empty()) rc.scene_path = "scene.json";
    if (Given("mode")) rc.loss.mode = ParseLossMode(mode);
    if (Given("lambda")) {
      if (lambda < 0.0) throw Error(ErrorCode::kOutOfRange, "--lambda must be >= 0");
      rc.loss.lambda = lambda;
    }
    if (Given("eta")) {
      if (!(eta > 0.0 && eta < 1.0)) {
        throw Error(ErrorCode::kOutOfRange, "--eta must lie in (0, 1)");
      }
      rc.loss.eta = eta;
    }
    if (Given("iters")) rc.optimizer.iterations = iters;
    if (Given("trace")) rc.optimizer.trace_every = trace_every;
    if (Given("seeds")) rc.seeds = ParseList<std::uint64_t>(seeds, "--seed");
    if (Given("aniso")) rc.parameters.anisotropic = anisotropic;
    if (Given("pff")) rc.parameters.per_frame_fov = per_frame_fov;
    if (Given("asym")) rc.loss.symmetric = !asymmetric;
    if (Given("conf")) rc.loss.use_confidence = use_confidence;
    if (Given("wall")) rc.optimizer.wallclock = wallclock;
    rc.optimizer.Validate();
    return rc;
  }
};

void PrintSummary(std::ostream& out, const std::string& label,
                  const MetricSummary& m) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%s RRA@10 %.1f RTA@10 %.1f mAA@5/10/15 %.1f/%.1f/%.1f "
                "fov_err %.3f\n",
                label.c_str(), m.rra[1], m.rta[1], m.maa[0], m.maa[1], m.maa[2],
                m.fov_error);
  out << buf;
}

int CmdSynth(SynthFlags& flags, std::uint64_t seed, const std::string& out_path,
             std::ostream& out) {
  const SynthConfig config = flags.Build(seed);
  const SyntheticScene scene = Generate(config);
  SceneMeta meta;
  meta.generator = std::string("proba synth ") + RigName(config.rig);
  meta.seed = seed;
  WriteScene(out_path, scene.problem, meta);
  out << "wrote " << out_path << ": " << scene.problem.num_frames()
      << " frames, " << scene.problem.num_correspondences()
      << " correspondences\n";
  return kExitOk;
}

int CmdIngest(const std::string& matches, int stride, double conf_floor,
              double width, double height, const std::string& out_path,
              std::ostream& out) {
  const std::vector<Correspondence> corr =
      SampleCorrespondences(ReadDenseMatches(matches), stride, conf_floor);
  int max_id = 0;
  for (const Correspondence& c : corr) {
    if (c.frame_i < 0 || c.frame_j < 0) {
      throw Error(ErrorCode::kInvalidInput, "negative frame id in matches");
    }
    max_id = std::max({max_id, c.frame_i, c.frame_j});
  }
  std::vector<Frame> frames(max_id + 1);
  for (int k = 0; k <= max_id; ++k) {
    frames[k].id = k;
    frames[k].width = width;
    frames[k].height = height;
  }
  const SceneProblem problem(std::move(frames), corr);
  SceneMeta meta;
  meta.generator = "proba ingest";
  WriteScene(out_path, problem, meta);
  out << "wrote " << out_path << ": " << problem.num_frames() << " frames, "
      << problem.num_correspondences() << " correspondences\n";
  return kExitOk;
}

int CmdOptimize(const RunFlags& flags, const std::string& out_dir_flag,
                bool verbose, std::ostream& out, std::ostream& err) {
  RunConfig rc = flags.Build();
  if (!out_dir_flag.empty()) rc.output_dir = out_dir_flag;
  const SceneFile scene = ReadScene(rc.scene_path, rc.parameters);
  const fs::path dir(rc.output_dir);
  const bool single = rc.seeds.size() == 1;
  int status = kExitOk;
  for (std::uint64_t seed : rc.seeds) {
    SnapshotCallback cb;
    if (verbose) {
      cb = [&err](const TraceRow& row) {
        err << "iter " << row.iteration << " total " << row.total << "\n";
      };
    }
    const RunOutcome run = RunSeed(scene.problem, rc, seed, {}, cb);
    const std::string suffix = single ? "" : "_seed" + std::to_string(seed);
    WriteTraceCsv(dir / ("trace" + suffix + ".csv"), run.result.trace);
    WriteTextFile(dir / ("result" + suffix + ".json"),
                  ResultToJson(run.result, rc, seed, run.final_loss).dump(1) +
                      "\n");
    if (run.result.aborted) {
      err << "seed " << seed << ": aborted after " << run.result.iterations_done
          << " iterations: " << run.result.abort_message << "\n";
      status = kExitNumerical;
      continue;
    }
    out << "seed " << seed << " loss " << run.final_loss.total << "\n";
    if (run.metrics) PrintSummary(out, "  ", *run.metrics);
  }
  return status;
}

int CmdEval(const std::string& scene_path, const std::string& result_path,
            const std::string& out_path, std::ostream& out) {
  const SceneFile scene = ReadScene(scene_path);
  const std::string text = ReadTextFile(result_path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kInvalidInput, result_path + ": malformed JSON");
  }
  const MetricSummary m =
      EvaluateEstimate(scene.problem, ResultEstimateFromJson(doc));
  const std::string json = MetricsToJson(m).dump(1) + "\n";
  if (!out_path.empty()) WriteTextFile(out_path, json);
  out << json;
  return kExitOk;
}

int EmitSweep(const std::vector<SweepRow>& rows, const std::string& key,
              const std::string& out_path, std::ostream& out) {
  const std::string csv = SweepToCsv(rows, key);
  if (!out_path.empty()) WriteTextFile(out_path, csv);
  out << csv;
  for (const SweepRow& r : rows) {
    if (r.aborted > 0) return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Probabilistic initialization-free bundle adjustment"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene");
  SynthFlags synth_flags;
  synth_flags.Add(synth, true);
  std::uint64_t synth_seed = 0;
  std::string synth_out = "scene.json";
  synth->add_option("--seed", synth_seed, "scene seed");
  synth->add_option("--out", synth_out, "output scene JSON");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "sample dense matches into a scene");
  std::string matches_path, ingest_out = "scene.json";
  int stride = 16;
  double conf_floor = 0.01, ingest_w = 640, ingest_h = 480;
  ingest->add_option("--matches", matches_path, "dense match JSON-lines")->required();
  ingest->add_option("--stride", stride, "grid stride (px)");
  ingest->add_option("--conf-floor", conf_floor, "keep conf strictly above");
  ingest->add_option("--width", ingest_w, "image width");
  ingest->add_option("--height", ingest_h, "image height");
  ingest->add_option("--out", ingest_out, "output scene JSON");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "run the optimizer");
  RunFlags opt_flags;
  opt_flags.Add(optimize, true);
  std::string opt_out;
  bool verbose = false;
  optimize->add_option("--out", opt_out, "output directory");
  optimize->add_flag("-v,--verbose", verbose, "print snapshots");

  // eval
  auto* eval = app.add_subcommand("eval", "score a result against ground truth");
  std::string eval_scene = "scene.json", eval_result = "result.json", eval_out;
  eval->add_option("--scene", eval_scene, "scene JSON with ground truth");
  eval->add_option("--result", eval_result, "result JSON from optimize");
  eval->add_option("--out", eval_out, "also write the summary here");

  // sweep-lambda
  auto* sweep_lambda = app.add_subcommand("sweep-lambda", "grid over lambda");
  RunFlags sl_flags;
  sl_flags.Add(sweep_lambda, true);
  std::string lambda_values = "0,0.1,1,10", sl_out;
  sweep_lambda->add_option("--values", lambda_values, "comma-separated lambdas");
  sweep_lambda->add_option("--out", sl_out, "CSV output path");

  // sweep-frames
  auto* sweep_frames = app.add_subcommand("sweep-frames", "frame-count study");
  RunFlags sf_flags;
  sf_flags.Add(sweep_frames, false);
  SynthFlags sf_synth;
  sf_synth.Add(sweep_frames, false);
  std::string sf_scene, sf_out;
  std::uint64_t sf_scene_seed = 0;
  int n_min = 2, n_max = 10;
  sweep_frames->add_option("--scene", sf_scene,
                           "10-frame scene; synthesized when omitted");
  sweep_frames->add_option("--scene-seed", sf_scene_seed, "synthetic scene seed");
  sweep_frames->add_option("--min", n_min, "smallest frame count");
  sweep_frames->add_option("--max", n_max, "largest frame count");
  sweep_frames->add_option("--out", sf_out, "CSV output path");

  // plot
  auto* plot = app.add_subcommand("plot", "trace CSV to SVG");
  std::string plot_trace, plot_columns = "total", plot_out = "trace.svg",
                          plot_title;
  plot->add_option("--trace", plot_trace, "trace CSV")->required();
  plot->add_option("--columns", plot_columns, "comma-separated columns");
  plot->add_option("--out", plot_out, "SVG output path");
  plot->add_option("--title", plot_title, "chart title");

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1),
                                args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (synth->parsed()) return CmdSynth(synth_flags, synth_seed, synth_out, out);
    if (ingest->parsed()) {
      return CmdIngest(matches_path, stride, conf_floor, ingest_w, ingest_h,
                       ingest_out, out);
    }
    if (optimize->parsed()) return CmdOptimize(opt_flags, opt_out, verbose, out, err);
    if (eval->parsed()) return CmdEval(eval_scene, eval_result, eval_out, out);
    if (sweep_lambda->parsed()) {
      const RunConfig rc = sl_flags.Build();
      const SceneFile scene = ReadScene(rc.scene_path, rc.parameters);
      return EmitSweep(SweepLambda(scene.problem, rc,
                                   ParseList<double>(lambda_values, "--values")),
                       "lambda", sl_out, out);
    }
    if (sweep_frames->parsed()) {
      const RunConfig rc = sf_flags.Build();
      SceneProblem pool;
      if (!sf_scene.empty()) {
        pool = ReadScene(sf_scene, rc.parameters).problem;
      } else {
        SynthConfig sc = sf_synth.Build(sf_scene_seed);
        sc.n_frames = 10;
        pool = Generate(sc, rc.parameters).problem;
      }
      return EmitSweep(SweepFrames(pool, rc, n_min, n_max), "n_frames", sf_out,
                       out);
    }
    if (plot->parsed()) {
      const CsvTable table = ParseCsv(ReadTextFile(plot_trace));
      std::vector<std::string> columns;
      std::stringstream ss(plot_columns);
      for (std::string c; std::getline(ss, c, ',');) {
        if (!c.empty()) columns.push_back(c);
      }
      WriteTextFile(plot_out, TraceToSvg(table, columns, plot_title));
      out << "wrote " << plot_out << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.IsNumerical() ? kExitNumerical : kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace proba
