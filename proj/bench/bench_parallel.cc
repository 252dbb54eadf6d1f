// bench/bench_parallel.cc

// Copyright 2026  The nerkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


// OpenMP kernels against their serial references. Thread count is the
// benchmark argument; 0 means the serial reference.
//
//   nerkit_bench --benchmark_filter=Eval

#include <random>

#include <benchmark/benchmark.h>

#include "../tests/test_util.h"
#include "nerkit/corpus_eval.h"
#include "nerkit/ctc_decoder.h"
#include "nerkit/ngram_lm.h"

using namespace nerkit;

namespace {

struct EvalData {
  Manifest gt;
  Predictions pred;
};

const EvalData& GetEvalData() {
  static const EvalData data = [] {
    EvalData d;
    auto utts = testing::SyntheticCorpus(4000, 1);
    MockBackend mock(testing::SyntheticMock(utts, 0.15, 2));
    std::vector<BackendRequest> reqs;
    for (const auto& u : utts) {
      d.gt.records.push_back({u.id, "", "", u.tagged, {}});
      reqs.push_back({u.id, ""});
    }
    for (const auto& r : mock.Invoke(Capability::kE2eNer, reqs)) d.pred[r.id] = r.out;
    return d;
  }();
  return data;
}

void BM_EvalCorpus(benchmark::State& state) {
  const EvalData& d = GetEvalData();
  EvalConfig cfg;
  cfg.label_map = &LabelMapping::Default();
  cfg.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    EvalResult r = cfg.jobs == 0 ? EvalCorpusSerial(d.gt, d.pred, cfg)
                                 : EvalCorpus(d.gt, d.pred, cfg);
    benchmark::DoNotOptimize(r.prf.f1);
  }
  state.SetItemsProcessed(state.iterations() * d.gt.records.size());
}

std::vector<PosteriorMatrix> MakePosteriors(int n) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  const std::string symbols = std::string(1, '\0') + " abcdefghijklmnopqrstuvwxyz'";
  std::vector<PosteriorMatrix> out;
  for (int i = 0; i < n; ++i) {
    const int T = 60, V = static_cast<int>(symbols.size());
    std::vector<double> p;
    for (int t = 0; t < T; ++t) {
      std::vector<double> row(V);
      double sum = 0;
      for (double& x : row) sum += (x = u(rng) * u(rng) * u(rng));
      for (double x : row) p.push_back(x / sum);
    }
    out.emplace_back(T, symbols, 0, std::move(p));
  }
  return out;
}

void BM_BeamDecodeBatch(benchmark::State& state) {
  static const auto batch = MakePosteriors(32);
  BeamOptions opt;
  opt.beam_width = 16;
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = jobs == 0 ? BeamDecodeBatchSerial(batch, opt)
                       : BeamDecodeBatch(batch, opt, jobs);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * batch.size());
}

void BM_CountNgrams(benchmark::State& state) {
  static const auto corpus = [] {
    std::mt19937_64 rng(4);
    std::vector<std::string> lines;
    for (int s = 0; s < 20000; ++s) {
      std::vector<std::string> w;
      for (int i = 0, n = 5 + static_cast<int>(rng() % 20); i < n; ++i) {
        w.push_back("w" + std::to_string(rng() % 2000));
      }
      lines.push_back(JoinWords(w));
    }
    Vocabulary vocab;
    return InternCorpus(lines, &vocab);
  }();
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    NgramCounts c = jobs == 0 ? CountNgramsSerial(corpus, 4) : CountNgrams(corpus, 4, jobs);
    benchmark::DoNotOptimize(c.table(4).size());
  }
  state.SetItemsProcessed(state.iterations() * corpus.size());
}

}  // namespace

BENCHMARK(BM_EvalCorpus)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BeamDecodeBatch)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountNgrams)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
