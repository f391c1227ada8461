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

// Per-correspondence evaluation with forward-mode differentiation over the
// 28 local unknowns a correspondence touches. Pose unknowns are local
// perturbations R Exp(phi), t + R delta taken at zero, so their derivatives
// are exactly the H and W accumulators the batched kernels produce.

#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/AutoDiff>

#include "proba/losses.h"

namespace proba::detail {
namespace {

enum Local {
  kPhiI = 0,
  kDeltaI = 3,
  kPhiJ = 6,
  kDeltaJ = 9,
  kFocalI = 12,
  kFocalJ = 13,
  kLogDepthP = 14,
  kLogDepthQ = 15,
  kRadiusP = 16,
  kRadiusQ = 22,
  kNumLocal = 28
};

using Deriv = Eigen::Matrix<double, kNumLocal, 1>;
using Ad = Eigen::AutoDiffScalar<Deriv>;
using Vec2 = Eigen::Matrix<Ad, 2, 1>;
using Vec3 = Eigen::Matrix<Ad, 3, 1>;
using Mat2 = Eigen::Matrix<Ad, 2, 2>;
using Mat3 = Eigen::Matrix<Ad, 3, 3>;

Ad Var(double value, int index) { return Ad(value, kNumLocal, index); }
Ad Const(double value) { return Ad(value, Deriv::Zero()); }

Mat3 SkewAd(const Vec3& v) {
  Mat3 m;
  m << Const(0), -v.z(), v.y(), v.z(), Const(0), -v.x(), -v.y(), v.x(),
      Const(0);
  return m;
}

Mat3 Lift(const Eigen::Matrix3d& m) {
  Mat3 r;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) r(a, b) = Const(m(a, b));
  }
  return r;
}

// R (I + [v]x): first-order exact at v = 0.
Mat3 Perturbed(const Eigen::Matrix3d& R, const Vec3& v) {
  return Lift(R) * (Mat3::Identity() + SkewAd(v));
}

Ad Det2(const Mat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

Ad Det3(const Mat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

// x^T M^-1 x for a symmetric 2x2 M.
Ad Quad2(const Mat2& m, const Vec2& x, const Ad& det) {
  return (m(1, 1) * x.x() * x.x() - 2.0 * m(0, 1) * x.x() * x.y() +
          m(0, 0) * x.y() * x.y()) /
         det;
}

Ad Quad3(const Mat3& m, const Vec3& x, const Ad& det) {
  Mat3 adj;
  adj(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  adj(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  adj(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  adj(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  adj(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  adj(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  adj(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  adj(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  adj(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return x.dot(adj * x) / det;
}

struct Camera {
  Mat3 R;
  Vec3 t;
  Ad f;
  double cx, cy;
};

Camera MakeCamera(const kernels::FrameTable& table, int k, int phi, int delta,
                  int focal) {
  using F = kernels::FrameTable;
  Eigen::Matrix3d R;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) R(a, b) = table[F::Field(F::kR00 + 3 * a + b)][k];
  }
  const Eigen::Vector3d t(table[F::kT0][k], table[F::kT1][k], table[F::kT2][k]);
  Vec3 vphi, vdelta;
  for (int a = 0; a < 3; ++a) {
    vphi[a] = Var(0.0, phi + a);
    vdelta[a] = Var(0.0, delta + a);
  }
  Camera cam;
  cam.R = Perturbed(R, vphi);
  cam.t = Lift(R) * vdelta;
  for (int a = 0; a < 3; ++a) cam.t[a] += t[a];
  cam.f = Var(table[F::kFocal][k], focal);
  cam.cx = table[F::kCx][k];
  cam.cy = table[F::kCy][k];
  return cam;
}

struct Endpoint {
  Vec3 world;
  Mat3 cov;  // world frame
  Ad log_det_cov;
};

Endpoint MakeEndpoint(const Camera& cam, const Pixel& px, double log_depth,
                      int depth_var, std::span<const double> radius,
                      int radius_var, bool anisotropic) {
  const Ad d = exp(Var(log_depth, depth_var));
  Vec3 x_cam;
  x_cam << d * (px.u - cam.cx) / cam.f, d * (px.v - cam.cy) / cam.f, d;
  Endpoint e;
  e.world = cam.R.transpose() * (x_cam - cam.t);
  if (!anisotropic) {
    const Ad ls = Var(radius[0], radius_var);
    e.cov = Mat3::Identity() * exp(2.0 * ls);
    e.log_det_cov = 6.0 * ls;
    return e;
  }
  const Eigen::Vector3d a(radius[0], radius[1], radius[2]);
  const Eigen::Matrix3d Jr = RightJacobianSO3(a);
  Vec3 da;
  for (int k = 0; k < 3; ++k) da[k] = Var(0.0, radius_var + k);
  const Mat3 Ra = Perturbed(RotationMatrix(a), Lift(Jr) * da);
  Mat3 diag = Mat3::Zero();
  Ad log_det = Const(0.0);
  for (int k = 0; k < 3; ++k) {
    const Ad s = Var(radius[3 + k], radius_var + 3 + k);
    diag(k, k) = exp(2.0 * s);
    log_det += 2.0 * s;
  }
  const Mat3 body = Ra * diag * Ra.transpose();
  e.cov = cam.R.transpose() * body * cam.R;
  e.log_det_cov = log_det;
  return e;
}

struct DirectionValue {
  Ad loss;
  bool skipped = false;
};

DirectionValue Reproject(const Endpoint& src, const Camera& dst,
                         const Pixel& meas, const LossConfig& config) {
  const Vec3 x = dst.R * src.world + dst.t;
  DirectionValue out;
  const bool needs_depth = config.mode == LossMode::kProba ||
                           config.mode == LossMode::kClassicalBa;
  if (needs_depth && x.z().value() <= kDepthFloor) {
    const Ad gap = kDepthFloor - x.z();
    out.loss = config.barrier_offset + config.barrier_scale * gap * gap;
    out.skipped = true;
    return out;
  }
  switch (config.mode) {
    case LossMode::kProba: {
      const Ad iz = 1.0 / x.z();
      Eigen::Matrix<Ad, 2, 3> J;
      J << dst.f * iz, Const(0.0), -dst.f * x.x() * iz * iz, Const(0.0),
          dst.f * iz, -dst.f * x.y() * iz * iz;
      const Mat3 cov_cam = dst.R * src.cov * dst.R.transpose();
      const Mat2 sigma = J * cov_cam * J.transpose();
      Vec2 r;
      r << dst.f * x.x() * iz + dst.cx - meas.u,
          dst.f * x.y() * iz + dst.cy - meas.v;
      const Ad det = Det2(sigma);
      out.loss = 0.5 * Quad2(sigma, r, det) + 0.5 * log(det);
      break;
    }
    case LossMode::kClassicalBa: {
      const Ad ru = dst.f * x.x() / x.z() + dst.cx - meas.u;
      const Ad rv = dst.f * x.y() / x.z() + dst.cy - meas.v;
      out.loss = 0.5 * (ru * ru + rv * rv);
      break;
    }
    case LossMode::kPoseBaseline: {
      const Ad pu = dst.f * x.x() + dst.cx * x.z();
      const Ad pv = dst.f * x.y() + dst.cy * x.z();
      const Ad ou = pu - meas.u * x.z();
      const Ad ov = pv - meas.v * x.z();
      const Ad au = pu - meas.u;
      const Ad av = pv - meas.v;
      out.loss = 0.5 * ((1.0 - config.eta) * (ou * ou + ov * ov) +
                        config.eta * (au * au + av * av));
      break;
    }
    case LossMode::kExposeBaseline: {
      const Ad mu = (meas.u - dst.cx) / dst.f;
      const Ad mv = (meas.v - dst.cy) / dst.f;
      const Ad ou = x.x() - mu * x.z();
      const Ad ov = x.y() - mv * x.z();
      const Ad norm = sqrt(mu * mu + mv * mv + 1.0);
      const Ad along = (mu * x.x() + mv * x.y() + x.z()) / norm;
      out.loss = 0.5 * (ou * ou + ov * ov) + config.expose_eta * exp(-along);
      break;
    }
  }
  return out;
}

}  // namespace

void EvaluateGeneral(const SceneProblem& problem, const ParameterLayout& layout,
                     std::span<const double> params,
                     const kernels::FrameTable& frames,
                     const LossConfig& config, std::size_t begin,
                     std::size_t end, kernels::KernelOutputs* out) {
  using O = kernels::KernelOutputs;
  O& o = *out;
  const auto& corr = problem.correspondences();
  const bool aniso = layout.options().anisotropic;
  const std::size_t rdim = layout.RadiusDim();
  const double bc_offset =
      config.bc_normalization == BcNormalization::kPrinted ? std::log(2.0) : 0.0;
  for (std::size_t s = begin; s < end; ++s) {
    if (s >= corr.size()) {
      for (int field = 0; field < O::kNumFields; ++field) o[field][s] = 0.0;
      continue;
    }
    const Correspondence& c = corr[s];
    const int cs = static_cast<int>(s);
    const double w = config.use_confidence ? c.confidence : 1.0;
    const Camera ci = MakeCamera(frames, c.frame_i, kPhiI, kDeltaI, kFocalI);
    const Camera cj = MakeCamera(frames, c.frame_j, kPhiJ, kDeltaJ, kFocalJ);
    const Endpoint ep = MakeEndpoint(
        ci, c.p, params[layout.DepthP(cs)], kLogDepthP,
        params.subspan(layout.RadiusP(cs), rdim), kRadiusP, aniso);
    const Endpoint eq = MakeEndpoint(
        cj, c.q, params[layout.DepthQ(cs)], kLogDepthQ,
        params.subspan(layout.RadiusQ(cs), rdim), kRadiusQ, aniso);

    const DirectionValue d1 = Reproject(ep, cj, c.q, config);
    Ad reproj = w * d1.loss;
    int skipped = d1.skipped;
    if (config.symmetric) {
      const DirectionValue d2 = Reproject(eq, ci, c.p, config);
      reproj += w * d2.loss;
      skipped += d2.skipped;
    }
    Ad total = reproj;
    double bha = 0.0;
    if (config.mode == LossMode::kProba) {
      const Vec3 delta = ep.world - eq.world;
      const Mat3 mix = 0.5 * (ep.cov + eq.cov);
      const Ad det = Det3(mix);
      const Ad distance = 0.125 * Quad3(mix, delta, det) + 0.5 * log(det) -
                          0.25 * (ep.log_det_cov + eq.log_det_cov) + bc_offset;
      const Ad term = -w * exp(-2.0 * distance);
      bha = term.value();
      total += config.lambda * term;
    }

    const Deriv& g = total.derivatives();
    o[O::kReproj][s] = reproj.value();
    o[O::kBha][s] = bha;
    o[O::kSkipped][s] = skipped;
    o[O::kGradLogDepthP][s] = g[kLogDepthP];
    o[O::kGradLogDepthQ][s] = g[kLogDepthQ];
    for (int k = 0; k < 6; ++k) {
      const bool used = k < static_cast<int>(rdim) &&
                        config.mode == LossMode::kProba;
      o[O::kGradRadiusP + k][s] = used ? g[kRadiusP + k] : 0.0;
      o[O::kGradRadiusQ + k][s] = used ? g[kRadiusQ + k] : 0.0;
    }
    for (int a = 0; a < 3; ++a) {
      o[O::kHi + a][s] = g[kDeltaI + a];
      o[O::kWi + a][s] = g[kPhiI + a];
      o[O::kHj + a][s] = g[kDeltaJ + a];
      o[O::kWj + a][s] = g[kPhiJ + a];
    }
    o[O::kFocalI][s] = g[kFocalI];
    o[O::kFocalJ][s] = g[kFocalJ];
  }
}

}  // namespace proba::detail
