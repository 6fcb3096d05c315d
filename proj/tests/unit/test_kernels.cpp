#include <gtest/gtest.h>

#include <omp.h>

#include "oracles.hpp"
#include "partcrop/errors.hpp"
#include "partcrop/kernels.hpp"

using namespace partcrop;

namespace {

struct Instance {
  Matrix chi;
  Matrix queries;
  std::vector<ProbVector> gaussian;
  std::uint64_t benchmark_seed;
};

Instance random_instance(Rng& rng, std::size_t n, std::size_t m, std::size_t d) {
  Instance inst;
  inst.chi = Matrix(n, d);
  inst.queries = Matrix(m, d);
  for (double& x : inst.chi.data()) x = 2.0 * rng.normal();
  for (double& x : inst.queries.data()) x = 2.0 * rng.normal();
  inst.benchmark_seed = rng.next_u64();
  for (std::size_t i = 0; i < m; ++i) inst.gaussian.push_back(gaussian_benchmark(inst.benchmark_seed, i, n));
  return inst;
}

oracle::Mat rows_of(const Matrix& m) {
  oracle::Mat out;
  for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
  return out;
}

}  // namespace

TEST(ResponseEnergies, MatchesScalarOracleOnTinyInstances) {
  Rng rng(31337);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const auto m = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const auto d = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const auto inst = random_instance(rng, n, m, d);
    const auto e = response_energies(inst.chi, inst.queries, inst.gaussian);
    const auto expected = oracle::partcrop_energies(rows_of(inst.chi), rows_of(inst.queries), inst.benchmark_seed);
    const auto eu = oracle::descending(e.uniform);
    const auto eg = oracle::descending(e.gaussian);
    for (std::size_t i = 0; i < m; ++i) {
      EXPECT_NEAR(eu[i], expected[i], 1e-9);
      EXPECT_NEAR(eg[i], expected[m + i], 1e-9);
    }
  }
}

TEST(ResponseEnergies, SerialAndParallelAreBitIdentical) {
  Rng rng(4);
  for (int threads : {1, 2, 4, 7}) {
    omp_set_num_threads(threads);
    const auto inst = random_instance(rng, 49, 128, 32);
    const auto a = response_energies_serial(inst.chi, inst.queries, inst.gaussian);
    const auto b = response_energies(inst.chi, inst.queries, inst.gaussian);
    EXPECT_EQ(a.uniform, b.uniform);
    EXPECT_EQ(a.gaussian, b.gaussian);
  }
}

TEST(ResponseEnergies, NonNegative) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(rng, 16, 32, 8);
    const auto e = response_energies(inst.chi, inst.queries, inst.gaussian);
    for (double x : e.uniform) EXPECT_GE(x, -1e-12);
    for (double x : e.gaussian) EXPECT_GE(x, -1e-12);
  }
}

TEST(ResponseEnergies, ConstantMapGivesZeroUniformEnergy) {
  Matrix chi(6, 3);
  for (std::size_t j = 0; j < 6; ++j) {
    chi(j, 0) = 1.0;
    chi(j, 1) = -2.0;
    chi(j, 2) = 0.5;
  }
  Rng rng(1);
  const auto inst = random_instance(rng, 6, 5, 3);
  const auto e = response_energies(chi, inst.queries, inst.gaussian);
  for (double x : e.uniform) EXPECT_NEAR(x, 0.0, 1e-15);
}

TEST(ResponseEnergies, ShapeChecks) {
  Rng rng(2);
  const auto inst = random_instance(rng, 4, 3, 2);
  EXPECT_THROW(response_energies(inst.chi, Matrix(3, 5), inst.gaussian), InvalidInput);
  EXPECT_THROW(response_energies(inst.chi, inst.queries, std::span(inst.gaussian).first(2)), InvalidInput);
  std::vector<ProbVector> wrong(3, uniform_distribution(5));
  EXPECT_THROW(response_energies_serial(inst.chi, inst.queries, wrong), InvalidInput);
}

TEST(SimilarityMatrix, SerialAndParallelAgreeWithOracle) {
  Rng rng(8);
  const auto inst = random_instance(rng, 20, 40, 9);
  const auto s = similarity_matrix_serial(inst.chi, inst.queries);
  const auto p = similarity_matrix(inst.chi, inst.queries);
  EXPECT_EQ(s, p);
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t j = 0; j < 20; ++j) {
      double acc = 0.0;
      for (std::size_t d = 0; d < 9; ++d) acc += inst.queries(i, d) * inst.chi(j, d);
      EXPECT_NEAR(s(i, j), acc, 1e-12);
    }
  }
  EXPECT_THROW(similarity_matrix(inst.chi, Matrix(2, 3)), InvalidInput);
}
