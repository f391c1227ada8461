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

// Kernel bodies shared by every ISA. Each translation union instantiates
// them with its own lane type; the unnamed namespace keeps the copies apart
// so code built with wider instruction sets never leaks into the scalar path.
//
// Sign conventions: for a world point X = R_s^T (x_s - t_s) observed from a
// source frame s and reprojected into a target frame t as x_t = R_t X + t_t,
// with world-frame gradient h = dL/dX:
//   target: H_t += h,  W_t += X x h
//   source: H_s -= h,  W_s -= X x h,  dL/dx_s = R_s h
// The caller turns H, W into dL/dt_k = R_k H_k and dL/dr_k = J_r(r_k)^T W_k.

#include <cstddef>

#include "proba/kernels/kernel.h"

namespace proba::kernels {
namespace {

template <class L>
struct Vec3 {
  typename L::V x, y, z;
};

template <class L>
Vec3<L> Cross(const Vec3<L>& a, const Vec3<L>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <class L>
struct FrameLanes {
  typename L::V r[9];
  typename L::V t[3];
  typename L::V focal, cx, cy;

  // R v
  Vec3<L> Rotate(const Vec3<L>& v) const {
    return {r[0] * v.x + r[1] * v.y + r[2] * v.z,
            r[3] * v.x + r[4] * v.y + r[5] * v.z,
            r[6] * v.x + r[7] * v.y + r[8] * v.z};
  }
  // R^T v
  Vec3<L> RotateT(const Vec3<L>& v) const {
    return {r[0] * v.x + r[3] * v.y + r[6] * v.z,
            r[1] * v.x + r[4] * v.y + r[7] * v.z,
            r[2] * v.x + r[5] * v.y + r[8] * v.z};
  }
};

template <class L>
FrameLanes<L> GatherFrame(const FrameTable& table, const std::int32_t* index) {
  FrameLanes<L> f;
  for (int k = 0; k < 9; ++k) {
    f.r[k] = L::Gather(table[FrameTable::Field(FrameTable::kR00 + k)], index);
  }
  for (int k = 0; k < 3; ++k) {
    f.t[k] = L::Gather(table[FrameTable::Field(FrameTable::kT0 + k)], index);
  }
  f.focal = L::Gather(table[FrameTable::kFocal], index);
  f.cx = L::Gather(table[FrameTable::kCx], index);
  f.cy = L::Gather(table[FrameTable::kCy], index);
  return f;
}

// Gradient of one reprojection direction.
template <class L>
struct DirectionResult {
  typename L::V loss = 0.0;
  typename L::V skipped = 0.0;
  Vec3<L> h{0.0, 0.0, 0.0};        // dL/dX in world coordinates
  typename L::V dfocal = 0.0;      // dL/d(focal of the target frame)
  typename L::V dlogsigma = 0.0;
};

// Projects world point X into `target` and compares with the measured pixel
// (mu, mv). kProba selects the NLL with projected isotropic covariance,
// otherwise the plain squared pixel error.
template <class L, bool kProba>
DirectionResult<L> ReprojectDirection(const Vec3<L>& X,
                                      const FrameLanes<L>& target,
                                      typename L::V meas_u,
                                      typename L::V meas_v,
                                      typename L::V log_sigma,
                                      typename L::V sigma2,
                                      typename L::V weight,
                                      const KernelParams& params) {
  using V = typename L::V;
  const Vec3<L> xr = target.Rotate(X);
  const V x = xr.x + target.t[0];
  const V y = xr.y + target.t[1];
  const V z = xr.z + target.t[2];

  const auto valid = L::Greater(z, V(params.depth_floor));
  const V zs = L::Select(valid, z, V(1.0));
  const V f = target.focal;
  const V a = x / zs;
  const V b = y / zs;
  const V mu = (meas_u - target.cx) / f;
  const V mv = (meas_v - target.cy) / f;
  const V eu = a - mu;
  const V ev = b - mv;

  V loss, dlda, dldb, dldz, dldf, dlds;
  if constexpr (kProba) {
    const V c = a * mv - b * mu;
    const V S = eu * eu + ev * ev + c * c;
    const V D = 1.0 + a * a + b * b;
    const V k = zs * zs / sigma2;
    const V M = 0.5 * k * S / D;
    loss = M + 2.0 * L::Log(f) + 2.0 * log_sigma - 2.0 * L::Log(zs) +
           0.5 * L::Log(D);
    const V kd = 0.5 * k / D;
    const V sd = S / D;
    const V dsda = 2.0 * eu + 2.0 * c * mv;
    const V dsdb = 2.0 * ev - 2.0 * c * mu;
    dlda = kd * (dsda - 2.0 * a * sd) + a / D;
    dldb = kd * (dsdb - 2.0 * b * sd) + b / D;
    dldz = 2.0 * M / zs - 2.0 / zs;
    const V dsdmu = -2.0 * eu - 2.0 * c * b;
    const V dsdmv = -2.0 * ev + 2.0 * c * a;
    dldf = 2.0 / f - kd * (dsdmu * mu + dsdmv * mv) / f;
    dlds = 2.0 - 2.0 * M;
  } else {
    const V f2 = f * f;
    const V e2 = eu * eu + ev * ev;
    loss = 0.5 * f2 * e2;
    dlda = f2 * eu;
    dldb = f2 * ev;
    dldz = 0.0;
    dldf = f * e2 + f * (eu * mu + ev * mv);
    dlds = 0.0;
  }
  const V gx = dlda / zs;
  const V gy = dldb / zs;
  const V gz = dldz - (a * dlda + b * dldb) / zs;

  const V gap = V(params.depth_floor) - z;
  const V barrier = params.barrier_offset + params.barrier_scale * gap * gap;
  const V barrier_dz = -2.0 * params.barrier_scale * gap;

  DirectionResult<L> r;
  r.loss = weight * L::Select(valid, loss, barrier);
  r.skipped = L::Select(valid, V(0.0), V(1.0));
  const Vec3<L> g{weight * L::Select(valid, gx, V(0.0)),
                  weight * L::Select(valid, gy, V(0.0)),
                  weight * L::Select(valid, gz, barrier_dz)};
  r.h = target.RotateT(g);
  r.dfocal = weight * L::Select(valid, dldf, V(0.0));
  r.dlogsigma = weight * L::Select(valid, dlds, V(0.0));
  return r;
}

template <class L, bool kProba>
void ReprojectionKernel(const FrameTable& frames,
                        const CorrespondenceBatch& batch,
                        const KernelParams& params, std::size_t begin,
                        std::size_t end, KernelOutputs* out) {
  using V = typename L::V;
  KernelOutputs& o = *out;
  for (std::size_t s = begin; s < end; s += L::kWidth) {
    const FrameLanes<L> fi = GatherFrame<L>(frames, batch.frame_i.data() + s);
    const FrameLanes<L> fj = GatherFrame<L>(frames, batch.frame_j.data() + s);
    const V w = L::Load(batch.weight.data() + s);
    const V pu = L::Load(batch.pu.data() + s);
    const V pv = L::Load(batch.pv.data() + s);
    const V qu = L::Load(batch.qu.data() + s);
    const V qv = L::Load(batch.qv.data() + s);
    const V dp = L::Exp(L::Load(batch.log_depth_p.data() + s));
    const V dq = L::Exp(L::Load(batch.log_depth_q.data() + s));

    // Backprojection into each endpoint's own camera, then to world.
    const V npu = (pu - fi.cx) / fi.focal;
    const V npv = (pv - fi.cy) / fi.focal;
    const V nqu = (qu - fj.cx) / fj.focal;
    const V nqv = (qv - fj.cy) / fj.focal;
    const Vec3<L> xp_cam{npu * dp, npv * dp, dp};
    const Vec3<L> xq_cam{nqu * dq, nqv * dq, dq};
    const Vec3<L> xp = fi.RotateT(
        {xp_cam.x - fi.t[0], xp_cam.y - fi.t[1], xp_cam.z - fi.t[2]});
    const Vec3<L> xq = fj.RotateT(
        {xq_cam.x - fj.t[0], xq_cam.y - fj.t[1], xq_cam.z - fj.t[2]});

    V lsp = 0.0, lsq = 0.0, sp2 = 1.0, sq2 = 1.0;
    if constexpr (kProba) {
      lsp = L::Load(batch.log_sigma_p.data() + s);
      lsq = L::Load(batch.log_sigma_q.data() + s);
      const V sp = L::Exp(lsp);
      const V sq = L::Exp(lsq);
      sp2 = sp * sp;
      sq2 = sq * sq;
    }

    const DirectionResult<L> r1 =
        ReprojectDirection<L, kProba>(xp, fj, qu, qv, lsp, sp2, w, params);
    DirectionResult<L> r2;
    if (params.symmetric) {
      r2 = ReprojectDirection<L, kProba>(xq, fi, pu, pv, lsq, sq2, w, params);
    }

    Vec3<L> gp = r1.h;
    Vec3<L> gq = r2.h;
    V bha = 0.0, dlsp = r1.dlogsigma, dlsq = r2.dlogsigma;
    if constexpr (kProba) {
      const Vec3<L> delta{xp.x - xq.x, xp.y - xq.y, xp.z - xq.z};
      const V d2 = delta.x * delta.x + delta.y * delta.y + delta.z * delta.z;
      const V sbar = 0.5 * (sp2 + sq2);
      const V distance = d2 / (8.0 * sbar) + 1.5 * L::Log(sbar) -
                         1.5 * (lsp + lsq) + params.bc_distance_offset;
      const V bc = L::Exp(-distance);
      const V bc2 = bc * bc;
      bha = -(w * bc2);
      const V gd = 2.0 * params.lambda * w * bc2;
      const V scale = gd / (4.0 * sbar);
      const Vec3<L> gpw{scale * delta.x, scale * delta.y, scale * delta.z};
      gp = {gp.x + gpw.x, gp.y + gpw.y, gp.z + gpw.z};
      gq = {gq.x - gpw.x, gq.y - gpw.y, gq.z - gpw.z};
      const V ddds = -d2 / (8.0 * sbar * sbar) + 1.5 / sbar;
      dlsp = dlsp + gd * (ddds * sp2 - 1.5);
      dlsq = dlsq + gd * (ddds * sq2 - 1.5);
    }

    const Vec3<L> wp = Cross<L>(xp, gp);
    const Vec3<L> wq = Cross<L>(xq, gq);
    const Vec3<L> wp1 = Cross<L>(xp, r1.h);
    const Vec3<L> wq2 = Cross<L>(xq, r2.h);

    const Vec3<L> gcp = fi.Rotate(gp);
    const Vec3<L> gcq = fj.Rotate(gq);
    const V dldp = gcp.x * xp_cam.x + gcp.y * xp_cam.y + gcp.z * xp_cam.z;
    const V dldq = gcq.x * xq_cam.x + gcq.y * xq_cam.y + gcq.z * xq_cam.z;
    const V dfi = r2.dfocal - (gcp.x * npu + gcp.y * npv) * dp / fi.focal;
    const V dfj = r1.dfocal - (gcq.x * nqu + gcq.y * nqv) * dq / fj.focal;

    L::Store(o[KernelOutputs::kReproj] + s, r1.loss + r2.loss);
    L::Store(o[KernelOutputs::kBha] + s, bha);
    L::Store(o[KernelOutputs::kSkipped] + s, r1.skipped + r2.skipped);
    L::Store(o[KernelOutputs::kGradLogDepthP] + s, dldp);
    L::Store(o[KernelOutputs::kGradLogDepthQ] + s, dldq);
    L::Store(o[KernelOutputs::kGradRadiusP] + s, dlsp);
    L::Store(o[KernelOutputs::kGradRadiusQ] + s, dlsq);

    L::Store(o[KernelOutputs::kHi + 0] + s, r2.h.x - gp.x);
    L::Store(o[KernelOutputs::kHi + 1] + s, r2.h.y - gp.y);
    L::Store(o[KernelOutputs::kHi + 2] + s, r2.h.z - gp.z);
    L::Store(o[KernelOutputs::kWi + 0] + s, wq2.x - wp.x);
    L::Store(o[KernelOutputs::kWi + 1] + s, wq2.y - wp.y);
    L::Store(o[KernelOutputs::kWi + 2] + s, wq2.z - wp.z);
    L::Store(o[KernelOutputs::kFocalI] + s, dfi);

    L::Store(o[KernelOutputs::kHj + 0] + s, r1.h.x - gq.x);
    L::Store(o[KernelOutputs::kHj + 1] + s, r1.h.y - gq.y);
    L::Store(o[KernelOutputs::kHj + 2] + s, r1.h.z - gq.z);
    L::Store(o[KernelOutputs::kWj + 0] + s, wp1.x - wq.x);
    L::Store(o[KernelOutputs::kWj + 1] + s, wp1.y - wq.y);
    L::Store(o[KernelOutputs::kWj + 2] + s, wp1.z - wq.z);
    L::Store(o[KernelOutputs::kFocalJ] + s, dfj);
  }
}

template <class L>
void AdamBody(double* theta, double* m, double* v, const double* grad,
              std::size_t begin, std::size_t end, const AdamCoefficients& c) {
  using V = typename L::V;
  for (std::size_t s = begin; s < end; s += L::kWidth) {
    const V g = L::Load(grad + s);
    const V m_new = c.beta1 * L::Load(m + s) + (1.0 - c.beta1) * g;
    const V v_new = c.beta2 * L::Load(v + s) + (1.0 - c.beta2) * (g * g);
    const V m_hat = m_new / c.bias_correction1;
    const V v_hat = v_new / c.bias_correction2;
    V th = L::Load(theta + s);
    th = th - c.lr * c.weight_decay * th;
    th = th - c.lr * m_hat / (L::Sqrt(v_hat) + c.eps);
    L::Store(m + s, m_new);
    L::Store(v + s, v_new);
    L::Store(theta + s, th);
  }
}

}  // namespace
}  // namespace proba::kernels
