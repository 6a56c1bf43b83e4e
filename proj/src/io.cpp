#include "harmonize/io.hpp"

#include <algorithm>

#include "harmonize/error.hpp"

namespace harmonize {

std::string_view to_string(DataFormat f) noexcept { return f == DataFormat::Sqlite ? "sqlite" : "csv"; }

DataFormat parse_data_format(std::string_view name) {
    if (name == "csv") return DataFormat::Csv;
    if (name == "sqlite") return DataFormat::Sqlite;
    if (name == "sas7bdat" || name == "rds") {
        throw io_error("UnsupportedFormat", "format '" + std::string(name) +
                                                "' is not supported; convert the data to CSV or SQLite first");
    }
    throw io_error("BadFormat", "unknown data format '" + std::string(name) + "' (expected csv or sqlite)");
}

DataFormat format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return (ext == ".db" || ext == ".sqlite" || ext == ".sqlite3") ? DataFormat::Sqlite : DataFormat::Csv;
}

std::optional<std::size_t> TabularSource::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i] == name) return i;
    }
    return std::nullopt;
}

void RowSink::write_row(std::span<const OutputValue> row) {
    if (row.size() != columns_.size()) {
        throw io_error("ColumnMismatch", "row has " + std::to_string(row.size()) + " values but the sink has " +
                                             std::to_string(columns_.size()) + " columns");
    }
    scratch_.resize(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) scratch_[i] = row[i].render();
    write_cells(scratch_);
}

void RowSink::write_text_row(std::span<const std::string> row) {
    if (row.size() != columns_.size()) {
        throw io_error("ColumnMismatch", "row has " + std::to_string(row.size()) + " values but the sink has " +
                                             std::to_string(columns_.size()) + " columns");
    }
    write_cells(row);
}

MissingCount count_missing(TabularSource& source) {
    MissingCount out;
    RowBatch batch;
    while (source.next_batch(batch)) {
        out.missing += kernels::count_missing_parallel(batch);
        out.cells += batch.cells.size();
        out.rows += batch.size();
    }
    return out;
}

}  // namespace harmonize
