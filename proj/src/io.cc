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

#include "proba/io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "proba/error.h"

namespace proba {
namespace {

[[noreturn]] void Invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kInvalidInput, (path.empty() ? "/" : path) + ": " + what);
}

// Schema helpers. `path` is the JSON pointer of `obj`.
const Json* Find(const Json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const Json& Require(const Json& obj, const std::string& key,
                    const std::string& path) {
  if (!obj.is_object()) Invalid(path, "expected an object");
  const Json* v = Find(obj, key);
  if (v == nullptr) Invalid(path + "/" + key, "missing required field");
  return *v;
}

double AsNumber(const Json& v, const std::string& path) {
  if (!v.is_number()) Invalid(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) Invalid(path, "expected a finite number");
  return x;
}

std::int64_t AsInteger(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) Invalid(path, "expected an integer");
  return v.get<std::int64_t>();
}

bool AsBool(const Json& v, const std::string& path) {
  if (!v.is_boolean()) Invalid(path, "expected a boolean");
  return v.get<bool>();
}

std::string AsString(const Json& v, const std::string& path) {
  if (!v.is_string()) Invalid(path, "expected a string");
  return v.get<std::string>();
}

void CheckKeys(const Json& obj, const std::set<std::string>& allowed,
               const std::string& path) {
  if (!obj.is_object()) Invalid(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) Invalid(path + "/" + it.key(), "unknown field");
  }
}

std::string FormatNumber(double x) {
  if (x == 0.0) x = 0.0;  // no "-0" cells
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- poses

Json PoseToJson(const Pose& pose) {
  const Eigen::Matrix<double, 3, 4> M = pose.Matrix();
  Json rows = Json::array();
  for (int r = 0; r < 3; ++r) {
    rows.push_back({M(r, 0), M(r, 1), M(r, 2), M(r, 3)});
  }
  return rows;
}

Pose PoseFromJson(const Json& doc, const std::string& where) {
  Eigen::Matrix<double, 3, 4> M;
  if (doc.is_array() && doc.size() == 12) {
    for (int k = 0; k < 12; ++k) {
      M(k / 4, k % 4) = AsNumber(doc[k], where + "/" + std::to_string(k));
    }
  } else if (doc.is_array() && doc.size() == 3) {
    for (int r = 0; r < 3; ++r) {
      const std::string row_path = where + "/" + std::to_string(r);
      if (!doc[r].is_array() || doc[r].size() != 4) {
        Invalid(row_path, "expected 4 numbers");
      }
      for (int c = 0; c < 4; ++c) {
        M(r, c) = AsNumber(doc[r][c], row_path + "/" + std::to_string(c));
      }
    }
  } else {
    Invalid(where, "expected a 3x4 matrix");
  }
  const Eigen::Matrix3d R = M.leftCols<3>();
  if ((R.transpose() * R - Eigen::Matrix3d::Identity()).norm() > 1e-6 ||
      R.determinant() < 0.0) {
    Invalid(where, "rotation block is not a rotation");
  }
  return Pose::FromMatrix(M);
}

// ---------------------------------------------------------------- scenes

Json SceneToJson(const SceneProblem& problem, const SceneMeta& meta) {
  Json doc;
  Json frames = Json::array();
  for (const Frame& f : problem.frames()) {
    Json jf = {{"id", f.id}, {"width", f.width}, {"height", f.height}};
    if (f.gt_pose) jf["gt_pose"] = PoseToJson(*f.gt_pose);
    if (f.gt_fov) jf["gt_fov"] = *f.gt_fov;
    frames.push_back(std::move(jf));
  }
  Json corr = Json::array();
  for (const Correspondence& c : problem.correspondences()) {
    corr.push_back({{"i", c.frame_i},
                    {"j", c.frame_j},
                    {"px", c.p.u},
                    {"py", c.p.v},
                    {"qx", c.q.u},
                    {"qy", c.q.v},
                    {"conf", c.confidence}});
  }
  doc["frames"] = std::move(frames);
  doc["correspondences"] = std::move(corr);
  doc["meta"] = {{"generator", meta.generator},
                 {"seed", meta.seed},
                 {"units", meta.units}};
  return doc;
}

SceneFile SceneFromJson(const Json& doc, ParameterOptions options) {
  CheckKeys(doc, {"frames", "correspondences", "meta"}, "");
  const Json& jframes = Require(doc, "frames", "");
  if (!jframes.is_array() || jframes.empty()) {
    Invalid("/frames", "expected a non-empty array");
  }
  std::vector<Frame> frames;
  std::set<int> ids;
  for (std::size_t k = 0; k < jframes.size(); ++k) {
    const std::string path = "/frames/" + std::to_string(k);
    const Json& jf = jframes[k];
    CheckKeys(jf, {"id", "width", "height", "gt_pose", "gt_fov"}, path);
    Frame f;
    f.id = static_cast<int>(AsInteger(Require(jf, "id", path), path + "/id"));
    f.width = AsNumber(Require(jf, "width", path), path + "/width");
    f.height = AsNumber(Require(jf, "height", path), path + "/height");
    if (!(f.width > 0.0)) Invalid(path + "/width", "must be positive");
    if (!(f.height > 0.0)) Invalid(path + "/height", "must be positive");
    if (const Json* p = Find(jf, "gt_pose")) {
      f.gt_pose = PoseFromJson(*p, path + "/gt_pose");
    }
    if (const Json* v = Find(jf, "gt_fov")) {
      const double fov = AsNumber(*v, path + "/gt_fov");
      if (!(fov > 1.0 && fov < 179.0)) {
        Invalid(path + "/gt_fov", "must lie in (1, 179) degrees");
      }
      f.gt_fov = fov;
    }
    if (!ids.insert(f.id).second) Invalid(path + "/id", "duplicate frame id");
    frames.push_back(std::move(f));
  }
  std::sort(frames.begin(), frames.end(),
            [](const Frame& a, const Frame& b) { return a.id < b.id; });
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (frames[k].id != static_cast<int>(k)) {
      Invalid("/frames", "frame ids must be 0..F-1");
    }
  }

  const Json& jcorr = Require(doc, "correspondences", "");
  if (!jcorr.is_array() || jcorr.empty()) {
    Invalid("/correspondences", "expected a non-empty array");
  }
  const int F = static_cast<int>(frames.size());
  std::vector<Correspondence> corr;
  corr.reserve(jcorr.size());
  for (std::size_t k = 0; k < jcorr.size(); ++k) {
    const std::string path = "/correspondences/" + std::to_string(k);
    const Json& jc = jcorr[k];
    CheckKeys(jc, {"i", "j", "px", "py", "qx", "qy", "conf"}, path);
    Correspondence c;
    c.frame_i = static_cast<int>(AsInteger(Require(jc, "i", path), path + "/i"));
    c.frame_j = static_cast<int>(AsInteger(Require(jc, "j", path), path + "/j"));
    if (c.frame_i < 0 || c.frame_i >= F) Invalid(path + "/i", "unknown frame");
    if (c.frame_j < 0 || c.frame_j >= F) Invalid(path + "/j", "unknown frame");
    if (c.frame_i == c.frame_j) Invalid(path + "/j", "must differ from i");
    c.p.u = AsNumber(Require(jc, "px", path), path + "/px");
    c.p.v = AsNumber(Require(jc, "py", path), path + "/py");
    c.q.u = AsNumber(Require(jc, "qx", path), path + "/qx");
    c.q.v = AsNumber(Require(jc, "qy", path), path + "/qy");
    if (const Json* v = Find(jc, "conf")) {
      c.confidence = AsNumber(*v, path + "/conf");
      if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) {
        Invalid(path + "/conf", "must lie in [0, 1]");
      }
    }
    corr.push_back(c);
  }

  SceneMeta meta;
  if (const Json* jm = Find(doc, "meta")) {
    CheckKeys(*jm, {"generator", "seed", "units"}, "/meta");
    if (const Json* v = Find(*jm, "generator")) {
      meta.generator = AsString(*v, "/meta/generator");
    }
    if (const Json* v = Find(*jm, "seed")) {
      if (!v->is_number_unsigned() && !v->is_number_integer()) {
        Invalid("/meta/seed", "expected an integer");
      }
      meta.seed = v->get<std::uint64_t>();
    }
    if (const Json* v = Find(*jm, "units")) meta.units = AsString(*v, "/meta/units");
  }
  return SceneFile{SceneProblem(std::move(frames), std::move(corr), options),
                   meta};
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

namespace {

Json ParseJsonText(const std::string& text, const std::string& name) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kInvalidInput, name + ": malformed JSON: " + e.what());
  }
}

}  // namespace

void WriteScene(const std::filesystem::path& path, const SceneProblem& problem,
                const SceneMeta& meta) {
  WriteTextFile(path, SceneToJson(problem, meta).dump(1) + "\n");
}

SceneFile ReadScene(const std::filesystem::path& path, ParameterOptions options) {
  return SceneFromJson(ParseJsonText(ReadTextFile(path), path.string()), options);
}

SceneProblem SubsetScene(const SceneProblem& problem,
                         const std::vector<int>& frames) {
  std::map<int, int> remap;
  std::vector<Frame> out_frames;
  for (int k : frames) {
    if (k < 0 || k >= problem.num_frames()) {
      throw Error(ErrorCode::kOutOfRange, "frame " + std::to_string(k) +
                                              " is not in the scene");
    }
    if (!remap.emplace(k, static_cast<int>(out_frames.size())).second) {
      throw Error(ErrorCode::kInvalidInput, "frame listed twice");
    }
    Frame f = problem.frames()[k];
    f.id = remap[k];
    out_frames.push_back(std::move(f));
  }
  std::vector<Correspondence> corr;
  for (const Correspondence& c : problem.correspondences()) {
    auto a = remap.find(c.frame_i);
    auto b = remap.find(c.frame_j);
    if (a == remap.end() || b == remap.end()) continue;
    Correspondence m = c;
    m.frame_i = a->second;
    m.frame_j = b->second;
    corr.push_back(m);
  }
  return SceneProblem(std::move(out_frames), std::move(corr), problem.options());
}

std::vector<int> SelectEvalFrames(int n) {
  static const std::vector<std::vector<int>> kTable = {
      {0, 9},
      {0, 4, 9},
      {0, 3, 6, 9},
      {0, 2, 4, 6, 9},
      {0, 2, 4, 5, 7, 9},
      {0, 1, 3, 5, 6, 7, 9},
      {0, 1, 2, 4, 5, 6, 8, 9},
      {0, 1, 2, 3, 4, 5, 6, 7, 9},
      {0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
  };
  if (n < 2 || n > 10) {
    throw Error(ErrorCode::kOutOfRange, "n must lie in [2, 10]");
  }
  return kTable[n - 2];
}

// ---------------------------------------------------------- dense matches

std::vector<DenseMatch> ParseDenseMatches(const std::string& text) {
  std::vector<DenseMatch> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string path = "line " + std::to_string(lineno);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kInvalidInput, path + ": malformed JSON");
    }
    CheckKeys(j, {"i", "j", "px", "py", "qx", "qy", "conf"}, path);
    DenseMatch m;
    m.i = static_cast<int>(AsInteger(Require(j, "i", path), path + "/i"));
    m.j = static_cast<int>(AsInteger(Require(j, "j", path), path + "/j"));
    m.px = AsNumber(Require(j, "px", path), path + "/px");
    m.py = AsNumber(Require(j, "py", path), path + "/py");
    m.qx = AsNumber(Require(j, "qx", path), path + "/qx");
    m.qy = AsNumber(Require(j, "qy", path), path + "/qy");
    m.conf = AsNumber(Require(j, "conf", path), path + "/conf");
    if (!(m.conf >= 0.0 && m.conf <= 1.0)) {
      Invalid(path + "/conf", "must lie in [0, 1]");
    }
    out.push_back(m);
  }
  return out;
}

std::vector<DenseMatch> ReadDenseMatches(const std::filesystem::path& path) {
  return ParseDenseMatches(ReadTextFile(path));
}

std::string DenseMatchesToText(const std::vector<DenseMatch>& matches) {
  std::string out;
  for (const DenseMatch& m : matches) {
    const Json j = {{"i", m.i},   {"j", m.j},   {"px", m.px},    {"py", m.py},
                    {"qx", m.qx}, {"qy", m.qy}, {"conf", m.conf}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<DenseMatch> SampleDense(const std::vector<DenseMatch>& matches,
                                    int stride, double conf_floor) {
  if (stride < 1) throw Error(ErrorCode::kOutOfRange, "stride must be >= 1");
  auto on_grid = [stride](double x) {
    return x >= 0.0 && x == std::floor(x) &&
           std::fmod(x, static_cast<double>(stride)) == 0.0;
  };
  std::vector<DenseMatch> out;
  for (const DenseMatch& m : matches) {
    if (on_grid(m.px) && on_grid(m.py) && m.conf > conf_floor) out.push_back(m);
  }
  return out;
}

std::vector<Correspondence> SampleCorrespondences(
    const std::vector<DenseMatch>& matches, int stride, double conf_floor) {
  const std::vector<DenseMatch> kept = SampleDense(matches, stride, conf_floor);
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyAfterSampling,
                "no match survived sampling (stride " + std::to_string(stride) +
                    ", confidence floor " + FormatNumber(conf_floor) + ")");
  }
  std::vector<Correspondence> out;
  out.reserve(kept.size());
  for (const DenseMatch& m : kept) {
    Correspondence c;
    c.frame_i = m.i;
    c.frame_j = m.j;
    c.p = Pixel{m.px, m.py};
    c.q = Pixel{m.qx, m.qy};
    c.confidence = m.conf;
    out.push_back(c);
  }
  return out;
}

// ------------------------------------------------------------ run config

RunConfig RunConfigFromJson(const Json& doc) {
  CheckKeys(doc, {"loss", "optimizer", "parameters", "init", "seeds", "scene",
                  "output_dir"},
            "");
  RunConfig rc;
  if (const Json* jl = Find(doc, "loss")) {
    const std::string p = "/loss";
    CheckKeys(*jl, {"mode", "lambda", "eta", "expose_eta", "symmetric",
                    "use_confidence", "bc_normalization", "barrier_offset",
                    "barrier_scale"},
              p);
    if (const Json* v = Find(*jl, "mode")) {
      try {
        rc.loss.mode = ParseLossMode(AsString(*v, p + "/mode"));
      } catch (const Error&) {
        Invalid(p + "/mode", "expected one of proba, ba, pose, expose");
      }
    }
    if (const Json* v = Find(*jl, "lambda")) {
      rc.loss.lambda = AsNumber(*v, p + "/lambda");
      if (rc.loss.lambda < 0.0) Invalid(p + "/lambda", "must be >= 0");
    }
    if (const Json* v = Find(*jl, "eta")) {
      rc.loss.eta = AsNumber(*v, p + "/eta");
      if (!(rc.loss.eta > 0.0 && rc.loss.eta < 1.0)) {
        Invalid(p + "/eta", "must lie in (0, 1)");
      }
    }
    if (const Json* v = Find(*jl, "expose_eta")) {
      rc.loss.expose_eta = AsNumber(*v, p + "/expose_eta");
      if (rc.loss.expose_eta < 0.0) Invalid(p + "/expose_eta", "must be >= 0");
    }
    if (const Json* v = Find(*jl, "symmetric")) {
      rc.loss.symmetric = AsBool(*v, p + "/symmetric");
    }
    if (const Json* v = Find(*jl, "use_confidence")) {
      rc.loss.use_confidence = AsBool(*v, p + "/use_confidence");
    }
    if (const Json* v = Find(*jl, "bc_normalization")) {
      const std::string s = AsString(*v, p + "/bc_normalization");
      if (s == "standard") {
        rc.loss.bc_normalization = BcNormalization::kStandard;
      } else if (s == "printed") {
        rc.loss.bc_normalization = BcNormalization::kPrinted;
      } else {
        Invalid(p + "/bc_normalization", "expected standard or printed");
      }
    }
    if (const Json* v = Find(*jl, "barrier_offset")) {
      rc.loss.barrier_offset = AsNumber(*v, p + "/barrier_offset");
    }
    if (const Json* v = Find(*jl, "barrier_scale")) {
      rc.loss.barrier_scale = AsNumber(*v, p + "/barrier_scale");
      if (rc.loss.barrier_scale < 0.0) Invalid(p + "/barrier_scale", "must be >= 0");
    }
  }
  if (const Json* jo = Find(doc, "optimizer")) {
    const std::string p = "/optimizer";
    CheckKeys(*jo, {"lr_fov_depth", "lr_pose_radius", "beta1", "beta2", "eps",
                    "weight_decay", "iterations", "trace_every", "wallclock"},
              p);
    OptimizerConfig& o = rc.optimizer;
    auto positive = [&](const char* key, double* out) {
      if (const Json* v = Find(*jo, key)) {
        *out = AsNumber(*v, p + "/" + key);
        if (!(*out > 0.0)) Invalid(p + "/" + key, "must be positive");
      }
    };
    positive("lr_fov_depth", &o.lr_fov_depth);
    positive("lr_pose_radius", &o.lr_pose_radius);
    positive("eps", &o.eps);
    auto unit = [&](const char* key, double* out) {
      if (const Json* v = Find(*jo, key)) {
        *out = AsNumber(*v, p + "/" + key);
        if (!(*out >= 0.0 && *out < 1.0)) Invalid(p + "/" + key, "must lie in [0, 1)");
      }
    };
    unit("beta1", &o.beta1);
    unit("beta2", &o.beta2);
    if (const Json* v = Find(*jo, "weight_decay")) {
      o.weight_decay = AsNumber(*v, p + "/weight_decay");
      if (o.weight_decay < 0.0) Invalid(p + "/weight_decay", "must be >= 0");
    }
    if (const Json* v = Find(*jo, "iterations")) {
      const auto n = AsInteger(*v, p + "/iterations");
      if (n < 0 || n > 100000000) Invalid(p + "/iterations", "out of range");
      o.iterations = static_cast<int>(n);
    }
    if (const Json* v = Find(*jo, "trace_every")) {
      const auto n = AsInteger(*v, p + "/trace_every");
      if (n < 1 || n > 100000000) Invalid(p + "/trace_every", "must be >= 1");
      o.trace_every = static_cast<int>(n);
    }
    if (const Json* v = Find(*jo, "wallclock")) {
      o.wallclock = AsBool(*v, p + "/wallclock");
    }
  }
  if (const Json* jp = Find(doc, "parameters")) {
    CheckKeys(*jp, {"anisotropic", "per_frame_fov"}, "/parameters");
    if (const Json* v = Find(*jp, "anisotropic")) {
      rc.parameters.anisotropic = AsBool(*v, "/parameters/anisotropic");
    }
    if (const Json* v = Find(*jp, "per_frame_fov")) {
      rc.parameters.per_frame_fov = AsBool(*v, "/parameters/per_frame_fov");
    }
  }
  if (const Json* ji = Find(doc, "init")) {
    const std::string p = "/init";
    CheckKeys(*ji, {"fov", "depth_mean", "depth_std", "depth_clamp", "sigma"}, p);
    InitOptions& in = rc.init;
    if (const Json* v = Find(*ji, "fov")) {
      in.fov_deg = AsNumber(*v, p + "/fov");
      if (!(in.fov_deg > 1.0 && in.fov_deg < 179.0)) {
        Invalid(p + "/fov", "must lie in (1, 179)");
      }
    }
    if (const Json* v = Find(*ji, "depth_mean")) {
      in.depth_mean = AsNumber(*v, p + "/depth_mean");
    }
    if (const Json* v = Find(*ji, "depth_std")) {
      in.depth_std = AsNumber(*v, p + "/depth_std");
      if (in.depth_std < 0.0) Invalid(p + "/depth_std", "must be >= 0");
    }
    if (const Json* v = Find(*ji, "depth_clamp")) {
      in.depth_clamp = AsNumber(*v, p + "/depth_clamp");
      if (!(in.depth_clamp > 0.0)) Invalid(p + "/depth_clamp", "must be positive");
    }
    if (const Json* v = Find(*ji, "sigma")) {
      in.sigma = AsNumber(*v, p + "/sigma");
      if (!(in.sigma > 0.0)) Invalid(p + "/sigma", "must be positive");
    }
  }
  if (const Json* js = Find(doc, "seeds")) {
    if (!js->is_array() || js->empty()) Invalid("/seeds", "expected a non-empty array");
    rc.seeds.clear();
    for (std::size_t k = 0; k < js->size(); ++k) {
      const std::string p = "/seeds/" + std::to_string(k);
      const auto s = AsInteger((*js)[k], p);
      if (s < 0) Invalid(p, "must be >= 0");
      rc.seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (const Json* v = Find(doc, "scene")) rc.scene_path = AsString(*v, "/scene");
  if (const Json* v = Find(doc, "output_dir")) {
    rc.output_dir = AsString(*v, "/output_dir");
  }
  return rc;
}

Json RunConfigToJson(const RunConfig& rc) {
  Json doc;
  doc["loss"] = {
      {"mode", LossModeName(rc.loss.mode)},
      {"lambda", rc.loss.lambda},
      {"eta", rc.loss.eta},
      {"expose_eta", rc.loss.expose_eta},
      {"symmetric", rc.loss.symmetric},
      {"use_confidence", rc.loss.use_confidence},
      {"bc_normalization", rc.loss.bc_normalization == BcNormalization::kStandard
                               ? "standard"
                               : "printed"},
      {"barrier_offset", rc.loss.barrier_offset},
      {"barrier_scale", rc.loss.barrier_scale}};
  const OptimizerConfig& o = rc.optimizer;
  doc["optimizer"] = {{"lr_fov_depth", o.lr_fov_depth},
                      {"lr_pose_radius", o.lr_pose_radius},
                      {"beta1", o.beta1},
                      {"beta2", o.beta2},
                      {"eps", o.eps},
                      {"weight_decay", o.weight_decay},
                      {"iterations", o.iterations},
                      {"trace_every", o.trace_every},
                      {"wallclock", o.wallclock}};
  doc["parameters"] = {{"anisotropic", rc.parameters.anisotropic},
                       {"per_frame_fov", rc.parameters.per_frame_fov}};
  doc["init"] = {{"fov", rc.init.fov_deg},
                 {"depth_mean", rc.init.depth_mean},
                 {"depth_std", rc.init.depth_std},
                 {"depth_clamp", rc.init.depth_clamp},
                 {"sigma", rc.init.sigma}};
  doc["seeds"] = rc.seeds;
  doc["scene"] = rc.scene_path;
  doc["output_dir"] = rc.output_dir;
  return doc;
}

// ------------------------------------------------------- traces, results

std::string TraceToCsv(const Trace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const TraceRow& r : trace.rows) {
    out += std::to_string(r.iteration);
    for (double v : {r.total, r.reproj, r.bha}) {
      out += ',';
      out += FormatNumber(v);
    }
    for (int group = 0; group < 3; ++group) {
      for (int k = 0; k < 3; ++k) {
        out += ',';
        if (r.metrics) {
          const auto& arr = group == 0   ? r.metrics->rra
                            : group == 1 ? r.metrics->rta
                                         : r.metrics->maa;
          out += FormatNumber(arr[k]);
        }
      }
    }
    out += ',';
    if (r.metrics) out += FormatNumber(r.metrics->fov_error);
    out += ',';
    out += FormatNumber(r.ms);
    out += '\n';
  }
  return out;
}

void WriteTraceCsv(const std::filesystem::path& path, const Trace& trace) {
  WriteTextFile(path, TraceToCsv(trace));
}

Json MetricsToJson(const MetricSummary& s) {
  Json j;
  const char* names[3] = {"5", "10", "15"};
  for (int k = 0; k < 3; ++k) {
    j[std::string("rra") + names[k]] = s.rra[k];
    j[std::string("rta") + names[k]] = s.rta[k];
    j[std::string("maa") + names[k]] = s.maa[k];
  }
  j["fov_error"] = s.fov_error;
  return j;
}

MetricSummary MetricsFromJson(const Json& doc) {
  MetricSummary s;
  const char* names[3] = {"5", "10", "15"};
  for (int k = 0; k < 3; ++k) {
    const std::string n = names[k];
    s.rra[k] = AsNumber(Require(doc, "rra" + n, ""), "/rra" + n);
    s.rta[k] = AsNumber(Require(doc, "rta" + n, ""), "/rta" + n);
    s.maa[k] = AsNumber(Require(doc, "maa" + n, ""), "/maa" + n);
  }
  s.fov_error = AsNumber(Require(doc, "fov_error", ""), "/fov_error");
  return s;
}

Json ResultToJson(const OptimizeResult& result, const RunConfig& config,
                  std::uint64_t seed, const LossReport& final_loss) {
  Json j;
  j["seed"] = seed;
  j["config"] = RunConfigToJson(config);
  j["iterations_done"] = result.iterations_done;
  j["aborted"] = result.aborted;
  if (result.aborted) {
    j["abort_code"] = ErrorCodeName(*result.abort_code);
    j["abort_message"] = result.abort_message;
  }
  j["loss"] = {{"total", final_loss.total},
               {"reproj", final_loss.reproj},
               {"bha", final_loss.bha},
               {"skipped", final_loss.skipped}};
  Json poses = Json::array();
  for (int k = 0; k < result.params.layout.num_frames(); ++k) {
    poses.push_back(PoseToJson(result.params.PoseOf(k)));
  }
  Json fov = Json::array();
  for (std::size_t k = 0; k < result.params.layout.NumFov(); ++k) {
    fov.push_back(result.params.values[result.params.layout.FovOffset() + k]);
  }
  j["estimate"] = {{"poses", poses}, {"fov", fov}};
  if (!result.trace.rows.empty() && result.trace.rows.back().metrics) {
    j["metrics"] = MetricsToJson(*result.trace.rows.back().metrics);
  }
  return j;
}

ResultEstimate ResultEstimateFromJson(const Json& doc) {
  const Json& est = Require(doc, "estimate", "");
  const Json& poses = Require(est, "poses", "/estimate");
  const Json& fov = Require(est, "fov", "/estimate");
  if (!poses.is_array() || poses.empty()) {
    Invalid("/estimate/poses", "expected a non-empty array");
  }
  if (!fov.is_array() || fov.empty()) {
    Invalid("/estimate/fov", "expected a non-empty array");
  }
  ResultEstimate r;
  for (std::size_t k = 0; k < poses.size(); ++k) {
    r.poses.push_back(
        PoseFromJson(poses[k], "/estimate/poses/" + std::to_string(k)));
  }
  for (std::size_t k = 0; k < fov.size(); ++k) {
    r.fov_deg.push_back(AsNumber(fov[k], "/estimate/fov/" + std::to_string(k)));
  }
  if (r.fov_deg.size() != 1 && r.fov_deg.size() != r.poses.size()) {
    Invalid("/estimate/fov", "expected one value or one per frame");
  }
  return r;
}

MetricSummary EvaluateEstimate(const SceneProblem& problem,
                               const ResultEstimate& estimate) {
  if (!problem.HasGroundTruth()) {
    throw Error(ErrorCode::kMissingGroundTruth, "scene has no ground truth");
  }
  if (estimate.poses.size() != problem.frames().size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "estimate and scene differ in frame count");
  }
  std::vector<Pose> gt;
  double fov_err = 0.0;
  int with_fov = 0;
  for (const Frame& f : problem.frames()) {
    gt.push_back(*f.gt_pose);
    if (f.gt_fov) {
      const double est = estimate.fov_deg.size() == 1 ? estimate.fov_deg[0]
                                                      : estimate.fov_deg[f.id];
      fov_err += FovError(est, *f.gt_fov);
      ++with_fov;
    }
  }
  if (with_fov > 0) fov_err /= with_fov;
  return Summarize(RelativePoseErrors(estimate.poses, gt), fov_err);
}

}  // namespace proba
