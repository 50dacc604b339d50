// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "gradcheck.hpp"

namespace codectok::testing {
namespace {

class GradientCase : public ::testing::TestWithParam<GradCase> {};

TEST_P(GradientCase, MatchesCentralDifferences) {
  const GradCase& c = GetParam();
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const GradCheckResult r = c.run(seed);
    EXPECT_GT(r.probes, 0u);
    EXPECT_TRUE(r.passes(1e-5)) << c.name << " seed " << seed << ": rel " << r.max_rel_error << ", norm rel "
                                << r.max_norm_rel_error << ", worst " << r.worst;
  }
}

INSTANTIATE_TEST_SUITE_P(AllOps, GradientCase, ::testing::ValuesIn(gradient_cases()),
                         [](const auto& info) { return info.param.name; });

TEST(GradCheck, LinearMeetsTighterBound) {
  for (const GradCase& c : gradient_cases()) {
    if (c.name != "linear") continue;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) EXPECT_TRUE(c.run(seed).passes(1e-6)) << "seed " << seed;
  }
}

}  // namespace
}  // namespace codectok::testing
