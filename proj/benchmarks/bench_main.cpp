#include <benchmark/benchmark.h>

#include <optional>
#include <random>
#include <vector>

#include "oddlink/graph.hpp"
#include "oddlink/sparse.hpp"
#include "oddlink/svd.hpp"
#include "oddlink/transforms.hpp"

namespace {

oddlink::BipartiteGraph synthetic_graph(std::size_t left, std::size_t right,
                                        std::size_t edges_per_left,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<oddlink::Edge> edges;
  std::vector<bool> used(right);
  for (std::uint32_t u = 0; u < left; ++u) {
    std::fill(used.begin(), used.end(), false);
    for (std::size_t k = 0; k < edges_per_left; ++k) {
      // mildly skewed degree distribution, enough structure for the SVD
      std::uint32_t w = static_cast<std::uint32_t>(
          (rng() % right + rng() % right) / 2);
      if (!used[w]) {
        used[w] = true;
        edges.push_back({u, w, std::nullopt});
      }
    }
  }
  return oddlink::BipartiteGraph::from_edges(left, right, std::move(edges));
}

void BM_spmv(benchmark::State& state) {
  auto g = synthetic_graph(static_cast<std::size_t>(state.range(0)), 2000, 40, 1);
  oddlink::SparseMatrix b = oddlink::biadjacency(g);
  std::vector<double> x(b.cols(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(b.multiply(x));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(b.nnz()));
}
BENCHMARK(BM_spmv)->Arg(1000)->Arg(4000);

void BM_truncated_svd(benchmark::State& state) {
  auto g = synthetic_graph(1000, 800, 30, 2);
  oddlink::SparseMatrix b = oddlink::biadjacency(g);
  oddlink::SvdOptions o;
  o.rank = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(oddlink::truncated_svd(b, o));
  }
}
BENCHMARK(BM_truncated_svd)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_score_row(benchmark::State& state) {
  auto g = synthetic_graph(1000, static_cast<std::size_t>(state.range(0)), 30, 3);
  oddlink::SvdOptions o;
  o.rank = 32;
  oddlink::SvdModel model = oddlink::truncated_svd(oddlink::biadjacency(g), o);
  oddlink::Sinh t{0.5 / model.singular_values[0], 1.0};
  std::size_t u = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(oddlink::score_row(model, t, u));
    u = (u + 1) % g.left_count;
  }
}
BENCHMARK(BM_score_row)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
