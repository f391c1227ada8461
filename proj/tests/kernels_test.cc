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

// SIMD kernels must reproduce the scalar reference bit for bit, and the
// reduction must not depend on the worker count.

#include "proba/kernels/kernel.h"

#include <cstring>
#include <random>

#include <gtest/gtest.h>

#include "proba/losses.h"
#include "test_util.h"

namespace proba {
namespace {

using kernels::Isa;

bool BitEqual(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool BitEqual(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

struct Evaluation {
  LossReport report;
  std::vector<double> grad;
};

Evaluation Evaluate(const testing::RandomProblem& rp, const LossConfig& config,
                    ObjectiveOptions options) {
  Objective objective(rp.scene.problem, config, options);
  Evaluation e;
  e.grad.resize(rp.params.values.size());
  e.report = objective.Evaluate(rp.params.values, e.grad, true);
  return e;
}

void ExpectIdentical(const Evaluation& a, const Evaluation& b) {
  EXPECT_TRUE(BitEqual(a.report.total, b.report.total));
  EXPECT_TRUE(BitEqual(a.report.reproj, b.report.reproj));
  EXPECT_TRUE(BitEqual(a.report.bha, b.report.bha));
  EXPECT_EQ(a.report.skipped, b.report.skipped);
  EXPECT_TRUE(BitEqual(a.grad, b.grad));
  EXPECT_TRUE(BitEqual(a.report.per_correspondence_reproj,
                       b.report.per_correspondence_reproj));
  EXPECT_TRUE(BitEqual(a.report.per_correspondence_bha,
                       b.report.per_correspondence_bha));
}

class KernelIsaTest : public ::testing::TestWithParam<LossMode> {};

TEST_P(KernelIsaTest, Avx2MatchesScalarBitForBit) {
  if (!kernels::IsaAvailable(Isa::kAvx2)) GTEST_SKIP() << "no AVX2 on this host";
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    // Odd correspondence counts exercise the padded tail.
    testing::RandomProblem rp = testing::MakeRandomProblem(seed, 4, 61);
    LossConfig config;
    config.mode = GetParam();
    Objective probe(rp.scene.problem, config, {});
    ASSERT_TRUE(probe.UsesBatchedKernel());
    const Evaluation scalar = Evaluate(rp, config, {.isa = Isa::kScalar});
    const Evaluation avx2 = Evaluate(rp, config, {.isa = Isa::kAvx2});
    ExpectIdentical(scalar, avx2);
  }
}

TEST_P(KernelIsaTest, BarrierPathMatchesScalar) {
  if (!kernels::IsaAvailable(Isa::kAvx2)) GTEST_SKIP() << "no AVX2 on this host";
  testing::RandomProblem rp = testing::MakeRandomProblem(9, 3, 40);
  // Push frame 1 past the scene so some predictions land behind it.
  rp.params.values[rp.params.layout.PoseOffset(1) + 5] -= 2.2;
  LossConfig config;
  config.mode = GetParam();
  const Evaluation scalar = Evaluate(rp, config, {.isa = Isa::kScalar});
  const Evaluation avx2 = Evaluate(rp, config, {.isa = Isa::kAvx2});
  EXPECT_GT(scalar.report.skipped, 0);
  ExpectIdentical(scalar, avx2);
}

INSTANTIATE_TEST_SUITE_P(Modes, KernelIsaTest,
                         ::testing::Values(LossMode::kProba,
                                           LossMode::kClassicalBa));

TEST(Reduction, IndependentOfWorkerCount) {
  testing::RandomProblem rp = testing::MakeRandomProblem(4, 5, 200);
  ASSERT_GT(rp.scene.problem.num_correspondences(), 1000);
  for (LossMode mode : {LossMode::kProba, LossMode::kClassicalBa,
                        LossMode::kPoseBaseline, LossMode::kExposeBaseline}) {
    LossConfig config;
    config.mode = mode;
    const Evaluation one = Evaluate(rp, config, {.workers = 1});
    for (int workers : {2, 3, 8}) {
      SCOPED_TRACE(LossModeName(mode));
      ExpectIdentical(one, Evaluate(rp, config, {.workers = workers}));
    }
  }
}

TEST(Reduction, GeneralPathIndependentOfWorkerCount) {
  testing::RandomProblem rp =
      testing::MakeRandomProblem(5, 4, 120, {.anisotropic = true});
  LossConfig config;
  const Evaluation one = Evaluate(rp, config, {.workers = 1});
  ExpectIdentical(one, Evaluate(rp, config, {.workers = 5}));
}

TEST(Adam, Avx2MatchesScalarBitForBit) {
  if (!kernels::IsaAvailable(Isa::kAvx2)) GTEST_SKIP() << "no AVX2 on this host";
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0, 1);
  for (std::size_t len : {1u, 3u, 4u, 5u, 17u, 1000u}) {
    std::vector<double> theta(len), m(len), v(len), grad(len);
    for (std::size_t k = 0; k < len; ++k) {
      theta[k] = n(rng);
      m[k] = 0.1 * n(rng);
      v[k] = std::abs(n(rng));
      grad[k] = n(rng);
    }
    kernels::AdamCoefficients c;
    c.lr = 1e-2;
    c.weight_decay = 0.01;
    c.bias_correction1 = 1 - std::pow(0.9, 7);
    c.bias_correction2 = 1 - std::pow(0.999, 7);
    auto t1 = theta, m1 = m, v1 = v;
    auto t2 = theta, m2 = m, v2 = v;
    kernels::AdamUpdate(Isa::kScalar, t1, m1, v1, grad, c);
    kernels::AdamUpdate(Isa::kAvx2, t2, m2, v2, grad, c);
    EXPECT_TRUE(BitEqual(t1, t2));
    EXPECT_TRUE(BitEqual(m1, m2));
    EXPECT_TRUE(BitEqual(v1, v2));
  }
}

TEST(Dispatch, NamesAndAvailability) {
  EXPECT_TRUE(kernels::IsaAvailable(Isa::kScalar));
  EXPECT_STREQ(kernels::IsaName(Isa::kScalar), "scalar");
  EXPECT_STREQ(kernels::IsaName(Isa::kAvx2), "avx2");
  EXPECT_TRUE(kernels::IsaAvailable(kernels::ActiveIsa()));
}

}  // namespace
}  // namespace proba
