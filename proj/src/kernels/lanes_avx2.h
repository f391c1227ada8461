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

// Four double lanes on AVX2. Only include from translation units compiled
// with -mavx2. Transcendentals go through libm lane by lane so every lane is
// bit-identical to ScalarLanes.

#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace proba::kernels {
namespace {

struct Avx2Vec {
  __m256d v;

  Avx2Vec() = default;
  Avx2Vec(__m256d x) : v(x) {}  // NOLINT
  Avx2Vec(double x) : v(_mm256_set1_pd(x)) {}  // NOLINT

  friend Avx2Vec operator+(Avx2Vec a, Avx2Vec b) { return _mm256_add_pd(a.v, b.v); }
  friend Avx2Vec operator-(Avx2Vec a, Avx2Vec b) { return _mm256_sub_pd(a.v, b.v); }
  friend Avx2Vec operator*(Avx2Vec a, Avx2Vec b) { return _mm256_mul_pd(a.v, b.v); }
  friend Avx2Vec operator/(Avx2Vec a, Avx2Vec b) { return _mm256_div_pd(a.v, b.v); }
  friend Avx2Vec operator-(Avx2Vec a) {
    return _mm256_xor_pd(a.v, _mm256_set1_pd(-0.0));
  }
  Avx2Vec& operator+=(Avx2Vec b) { return *this = *this + b; }
  Avx2Vec& operator-=(Avx2Vec b) { return *this = *this - b; }
};

struct Avx2Lanes {
  using V = Avx2Vec;
  using Mask = __m256d;
  static constexpr std::size_t kWidth = 4;

  static V Load(const double* p) { return _mm256_loadu_pd(p); }
  static void Store(double* p, V v) { _mm256_storeu_pd(p, v.v); }
  static V Gather(const double* base, const std::int32_t* index) {
    const __m128i idx =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(index));
    return _mm256_i32gather_pd(base, idx, 8);
  }
  static V Sqrt(V x) { return _mm256_sqrt_pd(x.v); }
  static V Log(V x) { return PerLane(x, [](double a) { return std::log(a); }); }
  static V Exp(V x) { return PerLane(x, [](double a) { return std::exp(a); }); }
  static Mask Greater(V a, V b) { return _mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ); }
  static V Select(Mask m, V a, V b) { return _mm256_blendv_pd(b.v, a.v, m); }

 private:
  template <class Fn>
  static V PerLane(V x, Fn fn) {
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, x.v);
    for (double& lane : lanes) lane = fn(lane);
    return _mm256_load_pd(lanes);
  }
};

}  // namespace
}  // namespace proba::kernels
