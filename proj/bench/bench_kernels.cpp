#include <benchmark/benchmark.h>

#include "partcrop/encoding.hpp"
#include "partcrop/features.hpp"
#include "partcrop/kernels.hpp"
#include "partcrop/synthetic_data.hpp"

using namespace partcrop;

namespace {

struct Instance {
  Matrix chi;
  Matrix queries;
  std::vector<ProbVector> gaussian;
};

Instance make_instance(std::size_t n, std::size_t m, std::size_t d) {
  Rng rng(17);
  std::vector<double> chi(n * d), q(m * d);
  for (double& x : chi) x = rng.normal();
  for (double& x : q) x = rng.normal();
  Instance inst{Matrix(n, d, chi), Matrix(m, d, q), {}};
  for (std::size_t i = 0; i < m; ++i) inst.gaussian.push_back(gaussian_benchmark(5, i, n));
  return inst;
}

void BM_ResponseEnergiesSerial(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 128, 64);
  for (auto _ : state) benchmark::DoNotOptimize(response_energies_serial(inst.chi, inst.queries, inst.gaussian));
}

void BM_ResponseEnergiesOmp(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 128, 64);
  for (auto _ : state) benchmark::DoNotOptimize(response_energies(inst.chi, inst.queries, inst.gaussian));
}

void BM_SimilarityMatrixSerial(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 128, 64);
  for (auto _ : state) benchmark::DoNotOptimize(similarity_matrix_serial(inst.chi, inst.queries));
}

void BM_SimilarityMatrixOmp(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 128, 64);
  for (auto _ : state) benchmark::DoNotOptimize(similarity_matrix(inst.chi, inst.queries));
}

std::vector<Image> patches(std::size_t count) {
  std::vector<Image> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(generate_synthetic_image(i, {16, 16, 3}));
  return out;
}

void BM_PatchEncodeSerial(benchmark::State& state) {
  const SyntheticEncoder enc(SyntheticEncoderConfig{});
  const auto batch = patches(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enc.Encoder::encode_patch_batch(batch));
}

void BM_PatchEncodeOmp(benchmark::State& state) {
  const SyntheticEncoder enc(SyntheticEncoderConfig{});
  const auto batch = patches(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enc.encode_patch_batch(batch));
}

}  // namespace

BENCHMARK(BM_ResponseEnergiesSerial)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_ResponseEnergiesOmp)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_SimilarityMatrixSerial)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_SimilarityMatrixOmp)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_PatchEncodeSerial)->Arg(32)->Arg(128);
BENCHMARK(BM_PatchEncodeOmp)->Arg(32)->Arg(128);

BENCHMARK_MAIN();
