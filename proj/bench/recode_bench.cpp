// Serial reference vs OpenMP kernels on a synthetic cohort-shaped batch.
#include <benchmark/benchmark.h>

#include <random>

#include "harmonize/io.hpp"
#include "harmonize/recode.hpp"

using namespace harmonize;

namespace {

const char* kVariables =
    "variable,label,labelLong,section,variableType,units,databaseStart,variableStart\n"
    "sex,Sex,,demo,categorical,,bench,[male]\n"
    "MMSE_category,MMSE band,,cog,categorical,,bench,[MMSE]\n"
    "age_c,Age,,demo,continuous,years,bench,[age]\n";

const char* kDetails =
    "variable,typeEnd,typeStart,databaseStart,variableStart,recEnd,catLabel,catLabelLong,units,recStart,notes\n"
    "sex,categorical,categorical,bench,[male],Female,,,,0,\n"
    "sex,categorical,categorical,bench,[male],Male,,,,1,\n"
    "MMSE_category,categorical,continuous,bench,[MMSE],severe,,,,\"[0,9]\",\n"
    "MMSE_category,categorical,continuous,bench,[MMSE],moderate,,,,\"[10,17]\",\n"
    "MMSE_category,categorical,continuous,bench,[MMSE],mild,,,,\"[18,23]\",\n"
    "MMSE_category,categorical,continuous,bench,[MMSE],normal,,,,\"[24,30]\",\n"
    "MMSE_category,categorical,continuous,bench,[MMSE],NA::b,,,,else,\n"
    "age_c,continuous,continuous,bench,[age],copy,,,years,copy,\n";

RowBatch make_batch(std::size_t rows) {
    std::mt19937 rng(7);
    RowBatch b;
    b.width = 3;
    b.cells.reserve(rows * 3);
    for (std::size_t i = 0; i < rows; ++i) {
        b.cells.push_back(std::to_string(rng() % 2));
        b.cells.push_back(rng() % 20 == 0 ? "NA" : std::to_string(rng() % 31));
        b.cells.push_back(std::to_string(60 + rng() % 40) + ".5");
    }
    return b;
}

struct Fixture {
    RecodePlan plan;
    std::vector<std::string> columns{"male", "MMSE", "age"};
    RowBatch batch;

    explicit Fixture(std::size_t rows) : batch(make_batch(rows)) {
        CompileOptions o;
        o.database = "bench";
        o.selected = {"sex", "MMSE_category", "age_c"};
        plan = compile_plan(parse_variable_sheet(kVariables), parse_details_sheet(kDetails), o);
    }
};

void BM_RecodeSerial(benchmark::State& state) {
    Fixture f(static_cast<std::size_t>(state.range(0)));
    BoundPlan bound(f.plan, f.columns);
    std::vector<OutputValue> out;
    kernels::BatchTally tally;
    for (auto _ : state) {
        kernels::recode_batch_serial(bound, f.batch, out, tally);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RecodeParallel(benchmark::State& state) {
    Fixture f(static_cast<std::size_t>(state.range(0)));
    BoundPlan bound(f.plan, f.columns);
    std::vector<OutputValue> out;
    kernels::BatchTally tally;
    for (auto _ : state) {
        kernels::recode_batch_parallel(bound, f.batch, out, tally);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MissingSerial(benchmark::State& state) {
    RowBatch b = make_batch(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::count_missing_serial(b));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MissingParallel(benchmark::State& state) {
    RowBatch b = make_batch(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::count_missing_parallel(b));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_RecodeSerial)->Arg(2250)->Arg(50000);
BENCHMARK(BM_RecodeParallel)->Arg(2250)->Arg(50000);
BENCHMARK(BM_MissingSerial)->Arg(2250)->Arg(50000);
BENCHMARK(BM_MissingParallel)->Arg(2250)->Arg(50000);

BENCHMARK_MAIN();
