#include <benchmark/benchmark.h>

#include "cict/eval.hpp"
#include "cict/experiment.hpp"
#include "cict/features.hpp"
#include "cict/model.hpp"

using namespace cict;

namespace {

struct Fixture {
  SynthOutput synth;
  TransitionNetwork net;
  FeatureMatrix features;
  std::vector<int> y;

  Fixture() {
    auto spec = PlantedNetworkSpec::desk_world(0);
    synth = generate(spec);
    net = build_network(extract_transitions(synth.dataset), synth.dataset);
    features = featurize_all(net);
    for (auto l : label_edges(synth.truth, net)) y.push_back(l == EdgeLabel::Random ? 0 : 1);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Generate(benchmark::State& state) {
  auto spec = PlantedNetworkSpec::desk_world(0);
  spec.n_entities = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_BuildNetwork(benchmark::State& state) {
  const auto& f = fixture();
  const auto ts = extract_transitions(f.synth.dataset);
  for (auto _ : state) benchmark::DoNotOptimize(build_network(ts, f.synth.dataset));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ts.size()));
}
BENCHMARK(BM_BuildNetwork)->Unit(benchmark::kMillisecond);

void BM_Featurize(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(featurize_all(f.net));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.net.edge_count()));
}
BENCHMARK(BM_Featurize)->Unit(benchmark::kMillisecond);

void BM_TrainForest(benchmark::State& state) {
  const auto& f = fixture();
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < static_cast<std::size_t>(state.range(0)); ++i) rows.push_back(i * 3 % f.features.rows());
  const auto x = f.features.select_rows(rows);
  std::vector<int> y;
  for (auto r : rows) y.push_back(f.y[r]);
  y[0] = 1 - y[0];  // both classes present
  TrainConfig cfg;
  cfg.n_trees = 30;
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(x, y, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TrainForest)->Arg(1000)->Arg(2000)->Arg(4000)->Arg(8000)->Complexity(benchmark::oNLogN)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto& f = fixture();
  TrainConfig cfg;
  cfg.n_trees = 30;
  const auto model = train_forest(f.features, f.y, cfg).forest;
  for (auto _ : state) benchmark::DoNotOptimize(predict(model, f.features));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.features.rows()));
}
BENCHMARK(BM_Predict)->Unit(benchmark::kMillisecond);

void BM_Pam(benchmark::State& state) {
  const auto& f = fixture();
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < static_cast<std::size_t>(state.range(0)); ++i) rows.push_back(i * 7 % f.features.rows());
  const auto x = f.features.select_rows(rows).values;
  for (auto _ : state) benchmark::DoNotOptimize(eval::pam_cluster(x, 2));
}
BENCHMARK(BM_Pam)->Arg(250)->Arg(534)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
