#include <benchmark/benchmark.h>

#include <random>

#include "jobalign/corpus.hpp"
#include "jobalign/encoder.hpp"
#include "jobalign/metrics.hpp"
#include "jobalign/ranker.hpp"
#include "jobalign/synthetic.hpp"
#include "jobalign/trainer.hpp"

using namespace jobalign;

namespace {

ModelParams bench_params() {
  EncoderConfig cfg;
  cfg.hash_buckets = 1u << 14;
  cfg.embed_dim = 64;
  return ModelParams::init(cfg, 42);
}

void BM_tokenize(benchmark::State& state) {
  EncoderConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        tokenize(cfg, "senior software development engineer – fulltime"));
  }
}
BENCHMARK(BM_tokenize);

void BM_embed_text(benchmark::State& state) {
  const ModelParams params = bench_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        embed_text(params, "senior software development engineer"));
  }
}
BENCHMARK(BM_embed_text);

void BM_info_nce(benchmark::State& state) {
  const std::size_t b = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat titles(b, 64), skills(b, 64);
  for (double& x : titles.data) x = dist(gen);
  for (double& x : skills.data) x = dist(gen);
  for (std::size_t r = 0; r < b; ++r) {
    vec_scale(titles.row(r), 1.0 / vec_norm(titles.row(r)));
    vec_scale(skills.row(r), 1.0 / vec_norm(skills.row(r)));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(info_nce_loss(titles, skills, 0.05));
  }
}
BENCHMARK(BM_info_nce)->Arg(64)->Arg(256)->Arg(1024);

void BM_train_epoch(benchmark::State& state) {
  SyntheticSpec spec;
  spec.clusters = 8;
  spec.titles_per_cluster = 6;
  const SyntheticData data = generate_synthetic(spec);
  EncoderConfig enc;
  enc.hash_buckets = 4096;
  enc.embed_dim = 32;
  TrainConfig cfg;
  cfg.batch_size = 32;
  cfg.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(data.train, enc, cfg));
  }
}
BENCHMARK(BM_train_epoch)->Unit(benchmark::kMillisecond);

void BM_rank_titles(benchmark::State& state) {
  const ModelParams params = bench_params();
  std::vector<std::pair<std::string, std::string>> candidates;
  for (int i = 0; i < 1000; ++i) {
    candidates.emplace_back("c" + std::to_string(i),
                            "candidate title " + std::to_string(i));
  }
  const VectorIndex index = build_index(params, candidates, Space::projected);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rank_titles("q", "candidate title 512", params, index));
  }
}
BENCHMARK(BM_rank_titles)->Unit(benchmark::kMicrosecond);

void BM_evaluate_run(benchmark::State& state) {
  Qrels qrels;
  RunData run;
  std::mt19937_64 gen(3);
  for (int q = 0; q < 100; ++q) {
    const std::string qid = "q" + std::to_string(q);
    std::vector<std::string> ranking;
    for (int d = 0; d < 100; ++d) ranking.push_back("d" + std::to_string(d));
    std::shuffle(ranking.begin(), ranking.end(), gen);
    for (int d = 0; d < 10; ++d) {
      qrels.relevant[qid].insert("d" + std::to_string(d * 7));
    }
    run.rankings[qid] = std::move(ranking);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_run(run, qrels, {5, 10}));
  }
}
BENCHMARK(BM_evaluate_run)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
