#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "harmonize/values.hpp"

namespace harmonize {

enum class DataFormat { Csv, Sqlite };

std::string_view to_string(DataFormat f) noexcept;

/// "csv" or "sqlite". Throws Error{UnsupportedFormat} for sas7bdat/rds and
/// Error{BadFormat} for anything else.
DataFormat parse_data_format(std::string_view name);

/// Guesses from the extension (.db/.sqlite/.sqlite3 => sqlite, else csv).
DataFormat format_from_path(const std::filesystem::path& path);

constexpr std::size_t kDefaultChunkSize = 50'000;

/// A contiguous run of rows, stored row-major as text. DB NULL is "".
struct RowBatch {
    std::size_t start_index = 0;
    std::size_t width = 0;
    std::vector<std::string> cells;

    std::size_t size() const noexcept { return width ? cells.size() / width : 0; }
    bool empty() const noexcept { return cells.empty(); }
    std::span<const std::string> row(std::size_t i) const noexcept {
        return {cells.data() + i * width, width};
    }
};

struct SourceOptions {
    DataFormat format = DataFormat::Csv;
    std::filesystem::path location;
    std::string table;  // sqlite only
    std::size_t chunk_size = kDefaultChunkSize;
    std::string dataset_name;
};

/// Streaming, single-reader handle over one table.
class TabularSource {
public:
    virtual ~TabularSource() = default;

    const SourceOptions& options() const noexcept { return options_; }
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    virtual std::optional<std::size_t> row_count_hint() const { return std::nullopt; }

    /// Fills `batch` with up to chunk_size rows; false once exhausted.
    /// Batches have gap-free, increasing start indices.
    virtual bool next_batch(RowBatch& batch) = 0;

    /// Restarts the stream from the first row.
    virtual void rewind() = 0;

    std::optional<std::size_t> column_index(std::string_view name) const;

protected:
    explicit TabularSource(SourceOptions options) : options_(std::move(options)) {}

    SourceOptions options_;
    std::vector<std::string> columns_;
};

/// Opens and reads the header/schema. Throws NotFound, BadFormat,
/// UnknownTable or UnsupportedFormat.
std::unique_ptr<TabularSource> open_source(const SourceOptions& options);

/// Writes fixed-width rows in order. Single writer; close() flushes.
class RowSink {
public:
    virtual ~RowSink() = default;

    const std::vector<std::string>& columns() const noexcept { return columns_; }

    /// Throws Error{ColumnMismatch} if the width is wrong.
    void write_row(std::span<const OutputValue> row);
    void write_text_row(std::span<const std::string> row);
    virtual void close() = 0;

protected:
    explicit RowSink(std::vector<std::string> columns) : columns_(std::move(columns)) {}
    virtual void write_cells(std::span<const std::string> row) = 0;

    std::vector<std::string> columns_;

private:
    std::vector<std::string> scratch_;
};

/// sqlite sinks replace `table` inside the file; csv sinks truncate the file.
std::unique_ptr<RowSink> open_sink(DataFormat format, const std::filesystem::path& location,
                                   const std::string& table, std::vector<std::string> columns);

/// Renders a sqlite table as CSV (header + rows), used to fingerprint DB output.
std::string sqlite_table_as_csv(const std::filesystem::path& location, const std::string& table);

struct MissingCount {
    std::size_t missing = 0;
    std::size_t cells = 0;
    std::size_t rows = 0;

    double fraction() const noexcept { return cells ? static_cast<double>(missing) / static_cast<double>(cells) : 0.0; }
};

/// Counts cells matching is_missing() over the rest of the stream.
MissingCount count_missing(TabularSource& source);

namespace kernels {
/// Missing cells in one batch; OpenMP across rows.
std::size_t count_missing_parallel(const RowBatch& batch);
/// Serial reference for count_missing_parallel.
std::size_t count_missing_serial(const RowBatch& batch);
}  // namespace kernels

}  // namespace harmonize
