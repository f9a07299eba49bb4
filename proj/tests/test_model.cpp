#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "modbpdn/errors.hpp"
#include "modbpdn/model.hpp"

namespace modbpdn {
namespace {

double max_column_norm_error(const SensingMatrix& a) {
  double worst = 0.0;
  for (Index j = 0; j < a.m(); ++j) worst = std::max(worst, std::abs(a.entries().col(j).norm() - 1.0));
  return worst;
}

TEST(SensingMatrix, UnitColumnsAtExperimentSize) {
  Rng rng(7);
  const SensingMatrix a = generate_sensing_matrix(307, 1024, rng);
  EXPECT_EQ(a.n(), 307);
  EXPECT_EQ(a.m(), 1024);
  EXPECT_LE(max_column_norm_error(a), 1e-12);
}

TEST(SensingMatrix, ScalarIsPlusOrMinusOne) {
  Rng rng(0);
  const SensingMatrix a = generate_sensing_matrix(1, 1, rng);
  EXPECT_EQ(std::abs(a.entries()(0, 0)), 1.0);
}

TEST(SensingMatrix, GramHasUnitDiagonal) {
  Rng rng(1);
  const SensingMatrix a = generate_sensing_matrix(6, 8, rng);
  for (Index j = 0; j < 8; ++j) {
    double ip = 0.0;
    for (Index i = 0; i < 6; ++i) ip += a.entries()(i, j) * a.entries()(i, j);
    EXPECT_NEAR(ip, 1.0, 1e-12) << "column " << j;
  }
}

TEST(SensingMatrix, DeterministicForSeed) {
  Rng r1(99), r2(99), r3(100);
  const SensingMatrix a = generate_sensing_matrix(20, 40, r1);
  const SensingMatrix b = generate_sensing_matrix(20, 40, r2);
  const SensingMatrix c = generate_sensing_matrix(20, 40, r3);
  EXPECT_TRUE(a.entries() == b.entries());
  EXPECT_FALSE(a.entries() == c.entries());
}

TEST(SensingMatrix, RejectsBadInput) {
  Rng rng(1);
  EXPECT_THROW(generate_sensing_matrix(0, 4, rng), ArgumentError);
  EXPECT_THROW(SensingMatrix::normalized(MatrixXd::Zero(3, 2)), ArgumentError);
}

TEST(Partition, BpdnCaseHasEmptyKnownSet) {
  Rng rng(3);
  const SupportPartition p = generate_partition(1024, 15, 15, 0, rng);
  EXPECT_TRUE(p.known().empty());
  EXPECT_EQ(p.unknown(), p.support());
  EXPECT_EQ(p.extended(), p.support());
}

TEST(Partition, TenPercentUnknownAndErroneous) {
  Rng rng(4);
  const SupportPartition p = generate_partition(1024, 100, 10, 10, rng);
  EXPECT_EQ(p.known().size(), 100u);
  EXPECT_EQ(p.extended().size(), 110u);
}

// Membership check of every set relation, index by index.
TEST(Partition, SetAlgebraHoldsExhaustively) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const SupportPartition p = generate_partition(20, 5, 2, 1, rng);
    auto in = [](const IndexSet& s, Index i) { return std::binary_search(s.begin(), s.end(), i); };
    ASSERT_EQ(p.support().size(), 5u);
    ASSERT_EQ(p.unknown().size(), 2u);
    ASSERT_EQ(p.erroneous().size(), 1u);
    ASSERT_EQ(p.extended().size(), p.support().size() + p.erroneous().size());
    for (Index i = 0; i < 20; ++i) {
      const bool n = in(p.support(), i), t = in(p.known(), i), d = in(p.unknown(), i),
                 e = in(p.erroneous(), i), ne = in(p.extended(), i);
      EXPECT_TRUE(!d || n) << "Delta subset of N";
      EXPECT_FALSE(e && n) << "Delta_e disjoint from N";
      EXPECT_EQ(t, (n || e) && !d) << "T = (N u Delta_e) \\ Delta";
      EXPECT_FALSE(t && d) << "T disjoint from Delta";
      EXPECT_EQ(ne, t || d) << "N_e = T u Delta";
      EXPECT_EQ(ne, n || e) << "N_e = N u Delta_e";
    }
  }
}

TEST(Partition, RejectsInconsistentSizes) {
  Rng rng(1);
  EXPECT_THROW(generate_partition(20, 5, 6, 0, rng), ArgumentError);
  EXPECT_THROW(generate_partition(20, 15, 2, 6, rng), ArgumentError);
}

TEST(Partition, ConstructorEnforcesInvariants) {
  EXPECT_THROW(SupportPartition(10, {1, 2}, {3}, {}), ArgumentError);     // Delta not in N
  EXPECT_THROW(SupportPartition(10, {1, 2}, {}, {2}), ArgumentError);     // Delta_e meets N
  EXPECT_THROW(SupportPartition(10, {1, 12}, {}, {}), ArgumentError);     // out of range
  EXPECT_THROW(SupportPartition(10, {2, 1}, {}, {}), ArgumentError);      // unsorted
  EXPECT_THROW(SupportPartition::from_known(10, {1, 2}, {2}), ArgumentError);
  const SupportPartition p = SupportPartition::from_known(10, {1, 4}, {2});
  EXPECT_EQ(p.extended(), (IndexSet{1, 2, 4}));
  EXPECT_EQ(p.known(), (IndexSet{1, 4}));
}

// Chi-square goodness of fit of support membership frequencies over 10^4
// draws. 49 degrees of freedom, 1% critical value 74.92.
TEST(Partition, SupportIndicesAreUniform) {
  constexpr Index m = 50;
  constexpr int draws = 10000;
  constexpr std::size_t k = 5;
  std::vector<double> counts(m, 0.0);
  Rng rng(2024);
  for (int d = 0; d < draws; ++d) {
    const SupportPartition p = generate_partition(m, k, 0, 0, rng);
    for (Index i : p.support()) counts[static_cast<std::size_t>(i)] += 1.0;
  }
  const double expected = static_cast<double>(draws * k) / static_cast<double>(m);
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 74.92);
}

TEST(Signal, VarianceAndSupport) {
  Rng rng(11);
  const SupportPartition p = generate_partition(1024, 100, 0, 0, rng);
  const VectorXd x = generate_signal(p, 100.0, rng);
  Index nonzero = 0;
  double sum = 0.0, sumsq = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) {
      ++nonzero;
      sum += x(i);
      sumsq += x(i) * x(i);
      EXPECT_TRUE(std::binary_search(p.support().begin(), p.support().end(), i));
    }
  }
  EXPECT_EQ(nonzero, 100);
  const double mean = sum / 100.0;
  const double var = (sumsq - 100.0 * mean * mean) / 99.0;
  EXPECT_NEAR(var, 100.0, 50.0);
}

TEST(Signal, EmptySupportGivesZero) {
  Rng rng(1);
  const SupportPartition p(16, {}, {}, {});
  EXPECT_TRUE(generate_signal(p, 100.0, rng).isZero(0.0));
  EXPECT_THROW(generate_signal(p, 0.0, rng), ArgumentError);
}

TEST(Signal, DeterministicForSeed) {
  const SupportPartition p(64, {3, 9, 17, 40, 63}, {}, {});
  Rng r1(5), r2(5);
  const VectorXd a = generate_signal(p, 100.0, r1);
  const VectorXd b = generate_signal(p, 100.0, r2);
  EXPECT_TRUE(a == b);
}

TEST(Measure, NoiselessIsExact) {
  Rng rng(8);
  const SensingMatrix a = generate_sensing_matrix(12, 30, rng);
  const SupportPartition p = generate_partition(30, 4, 0, 0, rng);
  const VectorXd x = generate_signal(p, 100.0, rng);
  const Measurement meas = measure(a, x, 0.0, rng);
  EXPECT_TRUE(meas.w.isZero(0.0));
  EXPECT_TRUE(meas.y == a.entries() * x);
}

TEST(Measure, NoiseEnergyMatchesVariance) {
  Rng rng(9);
  const SensingMatrix a = generate_sensing_matrix(307, 1024, rng);
  const Measurement meas = measure(a, VectorXd::Zero(1024), 0.0003, rng);
  const double expected = 307 * 0.0003;
  EXPECT_NEAR(meas.w.squaredNorm(), expected, 0.5 * expected);
  // Zero signal: y is the noise itself.
  EXPECT_TRUE(meas.y == meas.w);
}

TEST(Measure, RejectsBadInput) {
  Rng rng(1);
  const SensingMatrix a = generate_sensing_matrix(4, 6, rng);
  EXPECT_THROW(measure(a, VectorXd::Zero(5), 0.1, rng), ArgumentError);
  EXPECT_THROW(measure(a, VectorXd::Zero(6), -1.0, rng), ArgumentError);
}

TEST(Fractions, RoundToNearest) {
  EXPECT_EQ(measurements_for_fraction(0.3, 1024), 307);
  EXPECT_EQ(measurements_for_fraction(0.2, 1024), 205);
  EXPECT_EQ(measurements_for_fraction(0.5, 1024), 512);
}

TEST(Rng, SplitIgnoresParentConsumption) {
  Rng a(17), b(17);
  b.normal();
  b.normal();
  Rng ca = a.split("child"), cb = b.split("child");
  EXPECT_EQ(ca.normal(), cb.normal());
  EXPECT_NE(a.split("x").seed(), a.split("y").seed());
}

}  // namespace
}  // namespace modbpdn
