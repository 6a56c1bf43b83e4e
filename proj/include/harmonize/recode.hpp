#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "harmonize/dvl.hpp"
#include "harmonize/expr.hpp"
#include "harmonize/io.hpp"
#include "harmonize/sheet_model.hpp"
#include "harmonize/values.hpp"

namespace harmonize {

struct CompiledRule {
    MatchRule match;
    RecEnd output;
    std::string cat_label;
    std::size_t sheet_row = 0;  // 1-based details row
    /// Output for category and NA recEnds, fixed at compile time.
    std::optional<OutputValue> constant;
};

/// Rule table for one recoded variable in one database.
struct VariableRecode {
    std::string name;
    std::string source_column;
    VariableType type_start = VariableType::Categorical;
    VariableType type_end = VariableType::Categorical;
    std::vector<CompiledRule> rules;  // sheet order, else moved last
};

struct DerivedRecode {
    DvlVersion source;  // spec plus provenance (hash, author, createdAt)
    expr::ExprPtr body;

    const std::string& name() const noexcept { return source.spec.name; }
    VariableType output_type() const noexcept { return source.spec.output_type; }
};

/// Executable form of the sheets for one database. Immutable once built;
/// safe to share across threads.
struct RecodePlan {
    std::string database;
    std::vector<VariableRecode> recoded;
    std::vector<DerivedRecode> derived;  // topological order
    std::vector<std::string> passthrough;

    const VariableRecode* find_recoded(std::string_view name) const;
    const DerivedRecode* find_derived(std::string_view name) const;
    std::vector<std::string> derived_order() const;
    /// Recoded, then derived, then passthrough.
    std::vector<std::string> output_columns() const;
};

struct CompileOptions {
    std::string database;
    std::vector<std::string> selected;
    /// Source columns copied verbatim. A single "*" means every source
    /// column, which the caller expands (see expand_passthrough).
    std::vector<std::string> passthrough;
    /// Bodies for derived variables named in `selected`, matched by name.
    std::vector<DvlVersion> derived_specs;
};

/// Throws Error{UnknownDatabase, UnknownVariable, CyclicDerivation,
/// MissingComponent, MissingDerivedSpec, DuplicateOutputColumn, TypeError}.
RecodePlan compile_plan(const VariableSheet& vs, const DetailsSheet& ds, const CompileOptions& options);

/// Adds library specs as derived variables and re-sorts the derivation order.
RecodePlan apply_from_dvl(const RecodePlan& plan, const DerivedVariableLibrary& lib,
                          const std::vector<std::string>& names);

/// Same, with the versions already resolved (e.g. pinned by content hash).
RecodePlan apply_derived(const RecodePlan& plan, const std::vector<DvlVersion>& versions);

std::vector<std::string> expand_passthrough(const std::vector<std::string>& requested,
                                            const std::vector<std::string>& source_columns);

/// Result of matching one raw value; `unmatched` means no rule fired on a
/// non-missing value and the NA(b) default was used.
struct RecodeOutcome {
    OutputValue value;
    bool unmatched = false;
};

RecodeOutcome recode_value(const VariableRecode& table, std::optional<std::string_view> raw);
/// Throws Error{UnknownVariable} if `variable` is not recoded by `plan`.
OutputValue recode_value(const RecodePlan& plan, std::string_view variable, std::optional<std::string_view> raw);

/// Output row; `columns` is shared by every row of one run.
struct RecodedRow {
    std::shared_ptr<const std::vector<std::string>> columns;
    std::vector<OutputValue> values;

    const OutputValue& at(std::string_view column) const;
    std::vector<std::string> render() const;
};

/// A plan resolved against one source header.
class BoundPlan {
public:
    /// Throws Error{MissingSourceColumn}.
    BoundPlan(const RecodePlan& plan, std::span<const std::string> source_columns);

    const RecodePlan& plan() const noexcept { return *plan_; }
    const std::shared_ptr<const std::vector<std::string>>& output_columns() const noexcept { return columns_; }
    std::size_t width() const noexcept { return columns_->size(); }

    /// Recodes one source row into `out` (resized to width()). `unmatched`
    /// receives one flag per recoded variable when non-null.
    void recode_into(std::span<const std::string> row, std::span<OutputValue> out,
                     std::span<std::uint8_t> unmatched = {}) const;

private:
    struct DerivedSlot {
        std::vector<std::pair<std::string, std::size_t>> inputs;  // component -> output position
    };

    const RecodePlan* plan_;
    std::shared_ptr<const std::vector<std::string>> columns_;
    std::vector<std::size_t> recoded_source_;
    std::vector<std::size_t> passthrough_source_;
    std::vector<DerivedSlot> derived_slots_;
};

RecodedRow recode_row(const BoundPlan& bound, std::span<const std::string> row);

/// Convenience for a single row keyed by column name. Throws
/// Error{MissingSourceColumn} naming `row_index`.
RecodedRow recode_row(const RecodePlan& plan, const std::map<std::string, std::string>& row,
                      std::size_t row_index = 0);

struct NaTally {
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t c = 0;

    std::size_t total() const noexcept { return a + b + c; }
    void add(NACode code) noexcept;
    NaTally& operator+=(const NaTally& o) noexcept;
    bool operator==(const NaTally&) const = default;
};

struct RunStats {
    std::size_t rows_in = 0;
    std::size_t rows_out = 0;
    std::vector<std::string> columns;
    std::map<std::string, NaTally> na_counts;   // only columns with an NA
    std::map<std::string, std::size_t> unmatched;  // only columns with unmatched values

    bool operator==(const RunStats&) const = default;
};

nlohmann::json to_json(const RunStats& stats);

struct StreamOptions {
    bool strict_unmatched = false;
    bool parallel = true;
    std::function<void(std::size_t rows_done)> progress;
};

/// Recodes every remaining row of `source` into `sink` in input order.
/// Output is independent of chunk size and thread count. Does not close
/// the sink.
RunStats recode_stream(const RecodePlan& plan, TabularSource& source, RowSink& sink, const StreamOptions& options = {});

namespace kernels {

/// Per-batch tallies, indexed by output column / recoded variable.
struct BatchTally {
    std::vector<NaTally> na;
    std::vector<std::size_t> unmatched;
    /// Smallest batch row with an unmatched value, for strict mode.
    std::optional<std::size_t> first_unmatched_row;
    std::size_t first_unmatched_variable = 0;

    void reset(std::size_t width, std::size_t recoded);
};

/// Recodes all rows of `batch` into `out` (row-major, batch.size() * width),
/// OpenMP across rows.
void recode_batch_parallel(const BoundPlan& bound, const RowBatch& batch, std::vector<OutputValue>& out,
                           BatchTally& tally);

/// Serial reference for recode_batch_parallel.
void recode_batch_serial(const BoundPlan& bound, const RowBatch& batch, std::vector<OutputValue>& out,
                         BatchTally& tally);

}  // namespace kernels

}  // namespace harmonize
