// Parallel batch kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "jsonreward/batch.hpp"
#include "jsonreward/curation.hpp"
#include "jsonreward/taskgen.hpp"
#include "support/generators.hpp"

using namespace jsonreward;

namespace {

struct ScoreFixture {
    std::vector<SchemaDoc> schemas;
    std::vector<std::string> texts;
    std::vector<ScoreRequest> requests;

    explicit ScoreFixture(std::size_t n) {
        std::mt19937_64 rng(1);
        for (int i = 0; i < 32; ++i) schemas.push_back(compile(gen::task_schema(rng)).value());
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = schemas[i % schemas.size()];
            std::string text = satisfying_instance(s).value_or(Json::object()).dump(2);
            if (i % 3 == 1) text = gen::mutate_text(rng, text);
            if (i % 3 == 2) text.resize(text.size() / 2);
            texts.push_back(std::move(text));
        }
        for (std::size_t i = 0; i < n; ++i) requests.push_back({texts[i], &schemas[i % schemas.size()], ScoreMode::Strict});
    }
};

const ScoreFixture& score_fixture() {
    static const ScoreFixture f(4096);
    return f;
}

struct CurationFixture {
    std::vector<RawDocument> docs;
    Resolver resolver;

    CurationFixture() {
        std::mt19937_64 rng(2);
        auto corpus = gen::curation_corpus(rng, 1024);
        for (auto& [id, text] : corpus.docs) docs.push_back({id, text});
        resolver = MapResolver(corpus.remote);
    }
};

const CurationFixture& curation_fixture() {
    static const CurationFixture f;
    return f;
}

void BM_score_batch(benchmark::State& state) {
    const auto& f = score_fixture();
    for (auto _ : state) benchmark::DoNotOptimize(score_batch(f.requests));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.requests.size()));
    state.counters["threads"] = batch_threads();
}

void BM_score_batch_serial(benchmark::State& state) {
    const auto& f = score_fixture();
    for (auto _ : state) benchmark::DoNotOptimize(score_batch_serial(f.requests));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.requests.size()));
}

void BM_curate_batch(benchmark::State& state) {
    const auto& f = curation_fixture();
    for (auto _ : state) benchmark::DoNotOptimize(curate_batch(f.docs, f.resolver));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.docs.size()));
}

void BM_curate_batch_serial(benchmark::State& state) {
    const auto& f = curation_fixture();
    for (auto _ : state) benchmark::DoNotOptimize(curate_batch_serial(f.docs, f.resolver));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.docs.size()));
}

}  // namespace

BENCHMARK(BM_score_batch)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_score_batch_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_curate_batch)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_curate_batch_serial)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
