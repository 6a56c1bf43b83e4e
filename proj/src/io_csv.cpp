#include <fstream>

#include "harmonize/csv.hpp"
#include "harmonize/error.hpp"
#include "harmonize/io.hpp"
#include "io_detail.hpp"

namespace harmonize::detail {

namespace {

class CsvSource final : public TabularSource {
public:
    explicit CsvSource(SourceOptions options) : TabularSource(std::move(options)) { open(); }

    bool next_batch(RowBatch& batch) override {
        batch.start_index = next_row_;
        batch.width = columns_.size();
        batch.cells.clear();
        const std::size_t limit = options_.chunk_size ? options_.chunk_size : kDefaultChunkSize;
        std::size_t rows = 0;
        while (rows < limit && reader_->next(fields_)) {
            if (columns_.size() > 1 && fields_.size() == 1 && fields_[0].empty()) continue;
            if (fields_.size() != columns_.size()) {
                throw io_error("BadFormat",
                               options_.location.string() + ": data row " + std::to_string(next_row_ + rows) + " has " +
                                   std::to_string(fields_.size()) + " fields, header has " +
                                   std::to_string(columns_.size()),
                               "row " + std::to_string(next_row_ + rows));
            }
            for (auto& f : fields_) batch.cells.push_back(std::move(f));
            ++rows;
        }
        next_row_ += rows;
        return rows > 0;
    }

    void rewind() override { open(); }

private:
    void open() {
        reader_.reset();
        in_ = std::ifstream(options_.location, std::ios::binary);
        if (!in_) throw io_error("NotFound", "cannot open " + options_.location.string(), options_.location.string());
        reader_ = std::make_unique<csv::Reader>(in_);
        std::vector<std::string> header;
        if (!reader_->next(header) || (header.size() == 1 && header[0].empty())) {
            throw io_error("BadFormat", options_.location.string() + " has no header row", options_.location.string());
        }
        columns_ = std::move(header);
        next_row_ = 0;
    }

    std::ifstream in_;
    std::unique_ptr<csv::Reader> reader_;
    std::vector<std::string> fields_;
    std::size_t next_row_ = 0;
};

class CsvSink final : public RowSink {
public:
    CsvSink(const std::filesystem::path& location, std::vector<std::string> columns)
        : RowSink(std::move(columns)), location_(location), buffer_(1 << 20) {
        out_.rdbuf()->pubsetbuf(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
        out_.open(location, std::ios::binary | std::ios::trunc);
        if (!out_) throw io_error("IoError", "cannot write " + location.string(), location.string());
        csv::write_row(out_, columns_);
    }

    ~CsvSink() override {
        if (out_.is_open()) out_.close();
    }

    void close() override {
        if (!out_.is_open()) return;
        out_.flush();
        bool ok = static_cast<bool>(out_);
        out_.close();
        if (!ok) throw io_error("IoError", "failed writing " + location_.string(), location_.string());
    }

protected:
    void write_cells(std::span<const std::string> row) override {
        csv::write_row(out_, row);
        if (!out_) throw io_error("IoError", "failed writing " + location_.string(), location_.string());
    }

private:
    std::filesystem::path location_;
    std::vector<char> buffer_;
    std::ofstream out_;
};

}  // namespace

std::unique_ptr<TabularSource> open_csv_source(const SourceOptions& options) {
    return std::make_unique<CsvSource>(options);
}

std::unique_ptr<RowSink> open_csv_sink(const std::filesystem::path& location, std::vector<std::string> columns) {
    return std::make_unique<CsvSink>(location, std::move(columns));
}

}  // namespace harmonize::detail
