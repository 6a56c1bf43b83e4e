#include <algorithm>
#include <cstdint>

#include "harmonize/recode.hpp"

namespace harmonize::kernels {

void BatchTally::reset(std::size_t width, std::size_t recoded) {
    na.assign(width, NaTally{});
    unmatched.assign(recoded, 0);
    first_unmatched_row.reset();
    first_unmatched_variable = 0;
}

namespace {

void tally_row(BatchTally& t, std::size_t row, std::span<const OutputValue> values,
               std::span<const std::uint8_t> flags) {
    for (std::size_t c = 0; c < values.size(); ++c) {
        if (values[c].is_na()) t.na[c].add(values[c].na_code());
    }
    for (std::size_t v = 0; v < flags.size(); ++v) {
        if (!flags[v]) continue;
        ++t.unmatched[v];
        if (!t.first_unmatched_row || row < *t.first_unmatched_row) {
            t.first_unmatched_row = row;
            t.first_unmatched_variable = v;
        }
    }
}

void merge(BatchTally& into, const BatchTally& from) {
    for (std::size_t c = 0; c < into.na.size(); ++c) into.na[c] += from.na[c];
    for (std::size_t v = 0; v < into.unmatched.size(); ++v) into.unmatched[v] += from.unmatched[v];
    if (from.first_unmatched_row &&
        (!into.first_unmatched_row || *from.first_unmatched_row < *into.first_unmatched_row)) {
        into.first_unmatched_row = from.first_unmatched_row;
        into.first_unmatched_variable = from.first_unmatched_variable;
    }
}

}  // namespace

void recode_batch_serial(const BoundPlan& bound, const RowBatch& batch, std::vector<OutputValue>& out,
                         BatchTally& tally) {
    const std::size_t width = bound.width();
    const std::size_t recoded = bound.plan().recoded.size();
    const std::size_t n = batch.size();
    out.resize(n * width);
    tally.reset(width, recoded);
    std::vector<std::uint8_t> flags(recoded);
    for (std::size_t r = 0; r < n; ++r) {
        std::span<OutputValue> row_out(out.data() + r * width, width);
        bound.recode_into(batch.row(r), row_out, flags);
        tally_row(tally, r, row_out, flags);
    }
}

void recode_batch_parallel(const BoundPlan& bound, const RowBatch& batch, std::vector<OutputValue>& out,
                           BatchTally& tally) {
    const std::size_t width = bound.width();
    const std::size_t recoded = bound.plan().recoded.size();
    const long n = static_cast<long>(batch.size());
    out.resize(static_cast<std::size_t>(n) * width);
    tally.reset(width, recoded);

#pragma omp parallel
    {
        BatchTally local;
        local.reset(width, recoded);
        std::vector<std::uint8_t> flags(recoded);
#pragma omp for schedule(static)
        for (long r = 0; r < n; ++r) {
            const auto row = static_cast<std::size_t>(r);
            std::span<OutputValue> row_out(out.data() + row * width, width);
            bound.recode_into(batch.row(row), row_out, flags);
            tally_row(local, row, row_out, flags);
        }
#pragma omp critical(harmonize_recode_tally)
        merge(tally, local);
    }
}

}  // namespace harmonize::kernels
