#include <cstdint>

#include "harmonize/io.hpp"
#include "harmonize/text.hpp"

namespace harmonize::kernels {

std::size_t count_missing_parallel(const RowBatch& batch) {
    const auto n = static_cast<std::int64_t>(batch.cells.size());
    std::size_t total = 0;
#pragma omp parallel for reduction(+ : total) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        total += is_missing(batch.cells[static_cast<std::size_t>(i)]) ? 1 : 0;
    }
    return total;
}

std::size_t count_missing_serial(const RowBatch& batch) {
    std::size_t total = 0;
    for (const auto& cell : batch.cells) {
        if (is_missing(cell)) ++total;
    }
    return total;
}

}  // namespace harmonize::kernels
