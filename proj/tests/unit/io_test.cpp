#include <gtest/gtest.h>
#include <sqlite3.h>

#include <fstream>
#include <functional>
#include <sstream>

#include "harmonize/error.hpp"
#include "harmonize/io.hpp"
#include "harmonize/text.hpp"
#include "support/generators.hpp"
#include "support/test_support.hpp"

using namespace harmonize;
namespace ts = testing_support;

namespace {

std::string code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "none";
}

std::vector<std::vector<std::string>> drain(TabularSource& src, std::vector<std::size_t>* sizes = nullptr) {
    std::vector<std::vector<std::string>> rows;
    RowBatch b;
    std::size_t expect_start = 0;
    while (src.next_batch(b)) {
        EXPECT_EQ(b.start_index, expect_start);
        expect_start += b.size();
        if (sizes) sizes->push_back(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            auto r = b.row(i);
            rows.emplace_back(r.begin(), r.end());
        }
    }
    return rows;
}

// Line-split reading of an unquoted CSV; independent of the library reader.
std::vector<std::vector<std::string>> naive_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.emplace_back();
        rows.push_back(f);
    }
    return rows;
}

bool oracle_missing(const std::string& cell) {
    const auto b = cell.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string::npos) return true;
    const auto e = cell.find_last_not_of(" \t\r\n\f\v");
    const auto t = cell.substr(b, e - b + 1);
    return t == "NA" || t == "NaN";
}

void sql(sqlite3* db, const std::string& s) {
    char* err = nullptr;
    ASSERT_EQ(sqlite3_exec(db, s.c_str(), nullptr, nullptr, &err), SQLITE_OK) << (err ? err : "");
}

}  // namespace

TEST(Formats, Names) {
    EXPECT_EQ(parse_data_format("csv"), DataFormat::Csv);
    EXPECT_EQ(parse_data_format("sqlite"), DataFormat::Sqlite);
    EXPECT_EQ(code_of([] { parse_data_format("rds"); }), "UnsupportedFormat");
    EXPECT_EQ(code_of([] { parse_data_format("sas7bdat"); }), "UnsupportedFormat");
    EXPECT_EQ(code_of([] { parse_data_format("xlsx"); }), "BadFormat");
    EXPECT_EQ(format_from_path("a/b.sqlite3"), DataFormat::Sqlite);
    EXPECT_EQ(format_from_path("x.db"), DataFormat::Sqlite);
    EXPECT_EQ(format_from_path("x.csv"), DataFormat::Csv);
}

TEST(CsvSource, PaquidInFiveBatches) {
    auto src = open_source({DataFormat::Csv, ts::paquid_csv(), "", 500, "paquid"});
    EXPECT_EQ(src->columns().size(), 12u);
    EXPECT_EQ(src->columns()[6], "male");
    std::vector<std::size_t> sizes;
    auto rows = drain(*src, &sizes);
    EXPECT_EQ(sizes, (std::vector<std::size_t>{500, 500, 500, 500, 250}));
    EXPECT_EQ(rows, naive_csv(ts::paquid_csv()));
}

TEST(CsvSource, RewindRestarts) {
    auto src = open_source({DataFormat::Csv, ts::paquid_csv(), "", 1000, ""});
    auto first = drain(*src);
    src->rewind();
    EXPECT_EQ(drain(*src), first);
}

TEST(CsvSource, HeaderOnly) {
    ts::TempDir dir;
    ts::write_file(dir / "empty.csv", "a,b\n");
    auto src = open_source({DataFormat::Csv, dir / "empty.csv", "", 10, ""});
    EXPECT_EQ(src->columns(), (std::vector<std::string>{"a", "b"}));
    RowBatch b;
    EXPECT_FALSE(src->next_batch(b));
}

TEST(CsvSource, Errors) {
    ts::TempDir dir;
    EXPECT_EQ(code_of([&] { open_source({DataFormat::Csv, dir / "nope.csv", "", 10, ""}); }), "NotFound");
    ts::write_file(dir / "blank.csv", "");
    EXPECT_EQ(code_of([&] { open_source({DataFormat::Csv, dir / "blank.csv", "", 10, ""}); }), "BadFormat");
    ts::write_file(dir / "ragged.csv", "a,b\n1,2\n3\n");
    auto src = open_source({DataFormat::Csv, dir / "ragged.csv", "", 10, ""});
    RowBatch b;
    EXPECT_EQ(code_of([&] { src->next_batch(b); }), "BadFormat");
}

TEST(CsvSource, QuotedFieldsAndCrlf) {
    ts::TempDir dir;
    ts::write_file(dir / "q.csv", "\xEF\xBB\xBFid,text\r\n1,\"a, b\"\r\n2,\"multi\nline\"\r\n3,\r\n");
    auto src = open_source({DataFormat::Csv, dir / "q.csv", "", 2, ""});
    EXPECT_EQ(src->columns()[0], "id");
    auto rows = drain(*src);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0][1], "a, b");
    EXPECT_EQ(rows[1][1], "multi\nline");
    EXPECT_EQ(rows[2][1], "");
}

TEST(SqliteSource, ReadsTablesWithNulls) {
    ts::TempDir dir;
    const auto path = dir / "d.sqlite";
    sqlite3* db = nullptr;
    ASSERT_EQ(sqlite3_open(path.c_str(), &db), SQLITE_OK);
    sql(db, "CREATE TABLE t (id INTEGER, x REAL, s TEXT)");
    sql(db, "INSERT INTO t VALUES (1, 2.5, 'a'), (2, NULL, 'NA'), (3, 85.423, NULL)");
    sqlite3_close(db);

    auto src = open_source({DataFormat::Sqlite, path, "t", 2, ""});
    EXPECT_EQ(src->columns(), (std::vector<std::string>{"id", "x", "s"}));
    EXPECT_EQ(src->row_count_hint(), std::optional<std::size_t>(3));
    auto rows = drain(*src);
    EXPECT_EQ(rows, (std::vector<std::vector<std::string>>{{"1", "2.5", "a"}, {"2", "", "NA"}, {"3", "85.423", ""}}));
    src->rewind();
    EXPECT_EQ(count_missing(*src).missing, 3u);
    EXPECT_EQ(code_of([&] { open_source({DataFormat::Sqlite, path, "absent", 2, ""}); }), "UnknownTable");
    EXPECT_EQ(code_of([&] { open_source({DataFormat::Sqlite, dir / "none.db", "t", 2, ""}); }), "NotFound");
}

TEST(Sinks, CsvRendersValues) {
    ts::TempDir dir;
    auto sink = open_sink(DataFormat::Csv, dir / "o.csv", "", {"a", "b", "c", "d"});
    std::vector<OutputValue> row{OutputValue::category("x,y"), OutputValue::number(0.5), OutputValue::copied(" raw "),
                                 OutputValue::na(NACode::C)};
    sink->write_row(row);
    EXPECT_EQ(code_of([&] { sink->write_row(std::span(row).first(3)); }), "ColumnMismatch");
    sink->close();
    EXPECT_EQ(ts::read_file(dir / "o.csv"), "a,b,c,d\n\"x,y\",0.5, raw ,NA(c)\n");
}

TEST(Sinks, SqliteRoundTripAndReplace) {
    ts::TempDir dir;
    const auto path = dir / "o.db";
    gen::Rng rng(9);
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < 300; ++i) rows.push_back({gen::any_string(rng, 6), std::to_string(i), gen::label(rng)});
    for (int pass = 0; pass < 2; ++pass) {
        auto sink = open_sink(DataFormat::Sqlite, path, "out", {"s", "i", "l"});
        for (const auto& r : rows) sink->write_text_row(r);
        sink->close();
    }
    auto src = open_source({DataFormat::Sqlite, path, "out", 64, ""});
    EXPECT_EQ(drain(*src), rows);

    std::ostringstream expect;
    expect << "s,i,l\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) expect << ',';
            const bool quote = r[i].find_first_of(",\"\r\n") != std::string::npos;
            if (!quote) {
                expect << r[i];
                continue;
            }
            expect << '"';
            for (char c : r[i]) expect << (c == '"' ? "\"\"" : std::string(1, c));
            expect << '"';
        }
        expect << '\n';
    }
    EXPECT_EQ(sqlite_table_as_csv(path, "out"), expect.str());
}

TEST(Sinks, CsvAndSqliteAgree) {
    ts::TempDir dir;
    auto src = open_source({DataFormat::Csv, ts::paquid_csv(), "", 700, ""});
    auto csv_sink = open_sink(DataFormat::Csv, dir / "p.csv", "", src->columns());
    auto db_sink = open_sink(DataFormat::Sqlite, dir / "p.db", "paquid", src->columns());
    RowBatch b;
    while (src->next_batch(b)) {
        for (std::size_t i = 0; i < b.size(); ++i) {
            csv_sink->write_text_row(b.row(i));
            db_sink->write_text_row(b.row(i));
        }
    }
    csv_sink->close();
    db_sink->close();
    EXPECT_EQ(sqlite_table_as_csv(dir / "p.db", "paquid"), ts::read_file(dir / "p.csv"));
    auto a = open_source({DataFormat::Csv, dir / "p.csv", "", 333, ""});
    auto c = open_source({DataFormat::Sqlite, dir / "p.db", "paquid", 333, ""});
    EXPECT_EQ(drain(*a), drain(*c));
}

TEST(Missing, PaquidMatchesIndependentCount) {
    std::size_t missing = 0;
    std::size_t cells = 0;
    for (const auto& r : naive_csv(ts::paquid_csv())) {
        for (const auto& c : r) missing += oracle_missing(c), ++cells;
    }
    for (std::size_t chunk : {1u, 7u, 500u, 50000u}) {
        auto src = open_source({DataFormat::Csv, ts::paquid_csv(), "", chunk, ""});
        auto mc = count_missing(*src);
        EXPECT_EQ(mc.missing, missing) << chunk;
        EXPECT_EQ(mc.cells, cells);
        EXPECT_EQ(mc.rows, 2250u);
    }
}

TEST(Missing, NullTokens) {
    for (const char* m : {"", " ", "NA", " NA ", "NaN", "\tNaN"}) EXPECT_TRUE(is_missing(m)) << m;
    for (const char* p : {"na", "nan", "N/A", "NA(b)", "0", ".", "null"}) EXPECT_FALSE(is_missing(p)) << p;
}

TEST(Missing, ParallelKernelMatchesSerial) {
    gen::Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        RowBatch b;
        b.width = 1 + gen::pick(rng, 9);
        const std::size_t rows = gen::pick(rng, 3000);
        for (std::size_t i = 0; i < rows * b.width; ++i) {
            b.cells.push_back(gen::coin(rng, 0.2) ? (gen::coin(rng) ? "NA" : "") : gen::raw_cell(rng));
        }
        std::size_t expect = 0;
        for (const auto& c : b.cells) expect += oracle_missing(c);
        EXPECT_EQ(kernels::count_missing_serial(b), expect);
        EXPECT_EQ(kernels::count_missing_parallel(b), expect);
    }
}
