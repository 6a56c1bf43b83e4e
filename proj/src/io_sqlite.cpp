#include <sqlite3.h>

#include <sstream>

#include "harmonize/csv.hpp"
#include "harmonize/error.hpp"
#include "harmonize/io.hpp"
#include "io_detail.hpp"

namespace harmonize::detail {

namespace {

struct DbCloser {
    void operator()(sqlite3* db) const noexcept { sqlite3_close_v2(db); }
};
struct StmtFinalizer {
    void operator()(sqlite3_stmt* s) const noexcept { sqlite3_finalize(s); }
};
using Db = std::unique_ptr<sqlite3, DbCloser>;
using Stmt = std::unique_ptr<sqlite3_stmt, StmtFinalizer>;

std::string quote_ident(const std::string& name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

Db open_db(const std::filesystem::path& path, int flags) {
    sqlite3* raw = nullptr;
    int rc = sqlite3_open_v2(path.string().c_str(), &raw, flags, nullptr);
    Db db(raw);
    if (rc != SQLITE_OK) {
        throw io_error(rc == SQLITE_CANTOPEN ? "NotFound" : "IoError",
                       "cannot open " + path.string() + ": " + (raw ? sqlite3_errmsg(raw) : sqlite3_errstr(rc)),
                       path.string());
    }
    return db;
}

Stmt prepare(sqlite3* db, const std::string& sql, const std::filesystem::path& path) {
    sqlite3_stmt* raw = nullptr;
    int rc = sqlite3_prepare_v2(db, sql.c_str(), -1, &raw, nullptr);
    if (rc != SQLITE_OK) {
        std::string msg = sqlite3_errmsg(db);
        throw io_error(rc == SQLITE_NOTADB ? "BadFormat" : "IoError", path.string() + ": " + msg, path.string());
    }
    return Stmt(raw);
}

void exec(sqlite3* db, const std::string& sql, const std::filesystem::path& path) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        throw io_error("IoError", path.string() + ": " + msg, path.string());
    }
}

std::string column_text(sqlite3_stmt* stmt, int i) {
    const unsigned char* text = sqlite3_column_text(stmt, i);
    if (!text) return {};
    return std::string(reinterpret_cast<const char*>(text), static_cast<std::size_t>(sqlite3_column_bytes(stmt, i)));
}

Stmt select_all(sqlite3* db, const std::filesystem::path& path, const std::string& table) {
    auto check = prepare(db, "SELECT 1 FROM sqlite_master WHERE type IN ('table','view') AND name = ?1", path);
    sqlite3_bind_text(check.get(), 1, table.c_str(), -1, SQLITE_TRANSIENT);
    int rc = sqlite3_step(check.get());
    if (rc == SQLITE_NOTADB) throw io_error("BadFormat", path.string() + " is not a SQLite database", path.string());
    if (rc != SQLITE_ROW) {
        throw io_error("UnknownTable", "table '" + table + "' not found in " + path.string(), table);
    }
    return prepare(db, "SELECT * FROM " + quote_ident(table), path);
}

class SqliteSource final : public TabularSource {
public:
    explicit SqliteSource(SourceOptions options) : TabularSource(std::move(options)) {
        if (options_.table.empty()) throw io_error("BadFormat", "sqlite sources need a table name");
        if (!std::filesystem::exists(options_.location)) {
            throw io_error("NotFound", options_.location.string() + " does not exist", options_.location.string());
        }
        db_ = open_db(options_.location, SQLITE_OPEN_READONLY);
        stmt_ = select_all(db_.get(), options_.location, options_.table);
        const int n = sqlite3_column_count(stmt_.get());
        for (int i = 0; i < n; ++i) columns_.emplace_back(sqlite3_column_name(stmt_.get(), i));
        if (columns_.empty()) throw io_error("BadFormat", "table '" + options_.table + "' has no columns");
    }

    std::optional<std::size_t> row_count_hint() const override {
        auto count = prepare(db_.get(), "SELECT count(*) FROM " + quote_ident(options_.table), options_.location);
        if (sqlite3_step(count.get()) != SQLITE_ROW) return std::nullopt;
        return static_cast<std::size_t>(sqlite3_column_int64(count.get(), 0));
    }

    bool next_batch(RowBatch& batch) override {
        batch.start_index = next_row_;
        batch.width = columns_.size();
        batch.cells.clear();
        if (done_) return false;
        const std::size_t limit = options_.chunk_size ? options_.chunk_size : kDefaultChunkSize;
        const int width = static_cast<int>(columns_.size());
        std::size_t rows = 0;
        while (rows < limit) {
            int rc = sqlite3_step(stmt_.get());
            if (rc == SQLITE_DONE) {
                done_ = true;
                break;
            }
            if (rc != SQLITE_ROW) {
                throw io_error("IoError", options_.location.string() + ": " + sqlite3_errmsg(db_.get()),
                               "row " + std::to_string(next_row_ + rows));
            }
            for (int i = 0; i < width; ++i) batch.cells.push_back(column_text(stmt_.get(), i));
            ++rows;
        }
        next_row_ += rows;
        return rows > 0;
    }

    void rewind() override {
        sqlite3_reset(stmt_.get());
        next_row_ = 0;
        done_ = false;
    }

private:
    Db db_;
    Stmt stmt_;
    std::size_t next_row_ = 0;
    bool done_ = false;
};

class SqliteSink final : public RowSink {
public:
    SqliteSink(const std::filesystem::path& location, const std::string& table, std::vector<std::string> columns)
        : RowSink(std::move(columns)), location_(location) {
        if (table.empty()) throw io_error("BadFormat", "sqlite sinks need a table name");
        db_ = open_db(location, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
        exec(db_.get(), "PRAGMA synchronous = NORMAL", location_);
        exec(db_.get(), "BEGIN", location_);
        exec(db_.get(), "DROP TABLE IF EXISTS " + quote_ident(table), location_);
        std::string create = "CREATE TABLE " + quote_ident(table) + " (";
        std::string insert = "INSERT INTO " + quote_ident(table) + " VALUES (";
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            create += (i ? ", " : "") + quote_ident(columns_[i]) + " TEXT";
            insert += (i ? ", ?" : "?") + std::to_string(i + 1);
        }
        exec(db_.get(), create + ")", location_);
        insert_ = prepare(db_.get(), insert + ")", location_);
        in_transaction_ = true;
    }

    ~SqliteSink() override {
        if (in_transaction_) {
            insert_.reset();
            sqlite3_exec(db_.get(), "ROLLBACK", nullptr, nullptr, nullptr);
        }
    }

    void close() override {
        if (!in_transaction_) return;
        insert_.reset();
        exec(db_.get(), "COMMIT", location_);
        in_transaction_ = false;
    }

protected:
    void write_cells(std::span<const std::string> row) override {
        sqlite3_stmt* s = insert_.get();
        for (std::size_t i = 0; i < row.size(); ++i) {
            sqlite3_bind_text(s, static_cast<int>(i + 1), row[i].data(), static_cast<int>(row[i].size()),
                              SQLITE_TRANSIENT);
        }
        if (sqlite3_step(s) != SQLITE_DONE) {
            throw io_error("IoError", location_.string() + ": " + sqlite3_errmsg(db_.get()), location_.string());
        }
        sqlite3_reset(s);
    }

private:
    std::filesystem::path location_;
    Db db_;
    Stmt insert_;
    bool in_transaction_ = false;
};

}  // namespace

std::unique_ptr<TabularSource> open_sqlite_source(const SourceOptions& options) {
    return std::make_unique<SqliteSource>(options);
}

std::unique_ptr<RowSink> open_sqlite_sink(const std::filesystem::path& location, const std::string& table,
                                          std::vector<std::string> columns) {
    return std::make_unique<SqliteSink>(location, table, std::move(columns));
}

}  // namespace harmonize::detail

namespace harmonize {

std::unique_ptr<TabularSource> open_source(const SourceOptions& options) {
    return options.format == DataFormat::Sqlite ? detail::open_sqlite_source(options)
                                                : detail::open_csv_source(options);
}

std::unique_ptr<RowSink> open_sink(DataFormat format, const std::filesystem::path& location, const std::string& table,
                                   std::vector<std::string> columns) {
    return format == DataFormat::Sqlite ? detail::open_sqlite_sink(location, table, std::move(columns))
                                        : detail::open_csv_sink(location, std::move(columns));
}

std::string sqlite_table_as_csv(const std::filesystem::path& location, const std::string& table) {
    SourceOptions opts;
    opts.format = DataFormat::Sqlite;
    opts.location = location;
    opts.table = table;
    auto source = open_source(opts);
    std::ostringstream out;
    csv::write_row(out, source->columns());
    RowBatch batch;
    while (source->next_batch(batch)) {
        for (std::size_t r = 0; r < batch.size(); ++r) csv::write_row(out, batch.row(r));
    }
    return out.str();
}

}  // namespace harmonize
