// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdlib>
#include <numeric>
#include <set>
#include <stdexcept>

#include "rcl/parallel.hpp"
#include "rcl/random.hpp"

using namespace rcl;

TEST(Hashing, ReferenceValues) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Rng, MatchesMersenneTwisterWordStream) {
  Rng rng(5489);
  std::mt19937_64 reference(5489);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(rng(), reference());
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Rng, IndexCoversRangeUniformly) {
  Rng rng(2);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const std::size_t k = rng.index(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  double chi2 = 0.0;
  for (const int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);  // chi-square 6 dof, 99.9%
}

TEST(StreamFactory, ForksAreDeterministicAndDistinct) {
  const StreamFactory a(42);
  const StreamFactory b(42);
  EXPECT_EQ(a.fork("mu1").key(), b.fork("mu1").key());
  EXPECT_NE(a.fork("mu1").key(), a.fork("mu2").key());
  EXPECT_NE(a.fork(std::uint64_t{1}).key(), a.fork(std::uint64_t{2}).key());
  EXPECT_NE(StreamFactory(42).key(), StreamFactory(43).key());

  Rng s1 = a.fork("x").stream(3);
  Rng s2 = b.fork("x").stream(3);
  Rng s3 = a.fork("x").stream(4);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 10; ++i) {
    const auto w = s1();
    EXPECT_EQ(w, s2());
    firsts.insert(w);
    firsts.insert(s3());
  }
  EXPECT_EQ(firsts.size(), 20u);
}

TEST(RunTasks, ResultsIndependentOfWorkerCount) {
  const auto job = [](std::size_t t) {
    Rng rng = StreamFactory(9).stream(t);
    double s = 0.0;
    for (int i = 0; i < 1000; ++i) s += rng.uniform01();
    return s;
  };
  const auto one = run_tasks(37, 1, job);
  const auto many = run_tasks(37, 5, job);
  ASSERT_EQ(one.size(), 37u);
  EXPECT_EQ(one, many);
}

TEST(RunTasks, PropagatesExceptions) {
  const auto job = [](std::size_t t) -> int {
    if (t == 11) throw std::runtime_error("task failed");
    return static_cast<int>(t);
  };
  EXPECT_THROW(run_tasks(20, 3, job), std::runtime_error);
  EXPECT_THROW(run_tasks(20, 1, job), std::runtime_error);
}

TEST(RunTasks, WorkerCountFromEnvironment) {
  ::setenv("RCL_THREADS", "3", 1);
  EXPECT_EQ(default_worker_count(), 3u);
  ::setenv("RCL_THREADS", "0", 1);
  EXPECT_GE(default_worker_count(), 1u);
  ::unsetenv("RCL_THREADS");
  EXPECT_GE(default_worker_count(), 1u);
}
