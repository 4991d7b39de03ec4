// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "laytoken/model.hpp"
#include "laytoken/ntlp_loss.hpp"
#include "laytoken/rope.hpp"
#include "laytoken/serial_formats.hpp"
#include "laytoken/synthetic.hpp"

namespace {

using namespace laytoken;

doc::Document synthetic_document(std::size_t segments) {
  return doc::generate_synthetic_corpus({1, {segments, segments}, {1, 1}, 7, 1.0}).documents.front();
}

ntlp::InterleavedSequence pretrain_sequence(std::size_t segments) {
  return ntlp::build_sequence(synthetic_document(segments), layout::PositionScheme::SharedFirst, ntlp::Pretrain{},
                              nn::ModelConfig{}.max_context);
}

void BM_CountOverhead(benchmark::State& state) {
  const auto doc = synthetic_document(static_cast<std::size_t>(state.range(0)));
  const auto format = static_cast<serial::SerializationFormat>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(serial::count_overhead(doc, format));
  state.SetLabel(std::string(serial::format_name(format)));
}
BENCHMARK(BM_CountOverhead)->ArgsProduct({{8, 40}, benchmark::CreateDenseRange(0, 5, 1)});

void BM_RopeApply(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  nn::Tensor x(rows, 16);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (auto& v : x.values()) v = g(rng);
  std::vector<std::int64_t> ids(rows);
  for (std::size_t i = 0; i < rows; ++i) ids[i] = static_cast<std::int64_t>(i);
  for (auto _ : state) benchmark::DoNotOptimize(nn::rope_apply(x, ids));
}
BENCHMARK(BM_RopeApply)->Arg(64)->Arg(512);

void BM_Forward(benchmark::State& state) {
  const auto params = nn::init_params({}, 1);
  const auto seq = pretrain_sequence(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nn::forward(params, seq));
  state.counters["tokens"] = static_cast<double>(seq.size());
}
BENCHMARK(BM_Forward)->Arg(6)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_LossAndBackward(benchmark::State& state) {
  auto params = nn::init_params({}, 1);
  const auto seq = pretrain_sequence(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    params.zero_grad();
    nn::Tape tape;
    const auto loss = ntlp::ntlp_loss(tape, params, seq);
    tape.backward(loss.total);
  }
  state.counters["tokens"] = static_cast<double>(seq.size());
}
BENCHMARK(BM_LossAndBackward)->Arg(6)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
