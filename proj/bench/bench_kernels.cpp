// Serial vs OpenMP and reference vs Eigen GEMM timings for the hot kernels.
// Set OMP_NUM_THREADS to compare thread counts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lrg/network.hpp"
#include "lrg/synthgen.hpp"
#include "lrg/trainer.hpp"

using namespace lrg;

namespace {

const PointCloud& room() {
  static const PointCloud cloud = [] {
    RoomConfig rc;
    rc.spacing = 0.04;
    return generate_room(rc, 1);
  }();
  return cloud;
}

void BM_Normals(benchmark::State& st) {
  const auto exec = st.range(0) ? Exec::parallel : Exec::serial;
  for (auto _ : st) benchmark::DoNotOptimize(compute_normals_curvature(room(), 16, exec));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(room().size()));
}
BENCHMARK(BM_Normals)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

std::vector<TrainingSample> samples(std::size_t n, int ij) {
  std::mt19937 g(3);
  std::normal_distribution<float> nd;
  std::vector<TrainingSample> out(n);
  for (auto& s : out) {
    s.inliers = FeatureRows<float>(ij, kNumFeatures);
    s.neighbors = FeatureRows<float>(ij, kNumFeatures);
    for (Eigen::Index i = 0; i < s.inliers.size(); ++i) s.inliers.data()[i] = nd(g);
    for (Eigen::Index i = 0; i < s.neighbors.size(); ++i) s.neighbors.data()[i] = nd(g);
    s.remove_target.assign(static_cast<std::size_t>(ij), 0);
    s.add_target.assign(static_cast<std::size_t>(ij), 0);
    for (auto& t : s.add_target) t = g() % 2;
  }
  return out;
}

void BM_BatchGradient(benchmark::State& st) {
  const auto exec = st.range(0) ? Exec::parallel : Exec::serial;
  const Architecture arch = Architecture::desk_scale();
  const Network<float> net(arch);
  const auto params = init_params(arch, 1);
  const auto data = samples(32, 128);
  std::vector<const TrainingSample*> batch;
  for (const auto& s : data) batch.push_back(&s);
  BatchGradient bg(net);
  std::vector<float> grad;
  for (auto _ : st) benchmark::DoNotOptimize(bg.compute(params, batch, grad, exec));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_BatchGradient)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& st) {
  const auto kernel = st.range(0) ? kernels::Kernel::blas : kernels::Kernel::reference;
  const Architecture arch = Architecture::desk_scale();
  const Network<float> net(arch, kernel);
  const auto params = init_params(arch, 2);
  const auto s = samples(1, static_cast<int>(st.range(1))).front();
  std::vector<float> grad(params.size());
  ForwardCache<float> cache;
  for (auto _ : st) {
    net.forward(params, s.inliers, s.neighbors, &cache);
    net.backward(params, cache, s.remove_target, s.add_target, grad);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_ForwardBackward)
    ->ArgNames({"blas", "ij"})
    ->ArgsProduct({{0, 1}, {32, 128}})
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
