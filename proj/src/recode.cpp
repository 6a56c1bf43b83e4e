#include "harmonize/recode.hpp"

#include <algorithm>
#include <set>

#include "harmonize/error.hpp"
#include "harmonize/text.hpp"

namespace harmonize {

const VariableRecode* RecodePlan::find_recoded(std::string_view name) const {
    for (const auto& v : recoded) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

const DerivedRecode* RecodePlan::find_derived(std::string_view name) const {
    for (const auto& d : derived) {
        if (d.name() == name) return &d;
    }
    return nullptr;
}

std::vector<std::string> RecodePlan::derived_order() const {
    std::vector<std::string> out;
    for (const auto& d : derived) out.push_back(d.name());
    return out;
}

std::vector<std::string> RecodePlan::output_columns() const {
    std::vector<std::string> out;
    for (const auto& v : recoded) out.push_back(v.name);
    for (const auto& d : derived) out.push_back(d.name());
    out.insert(out.end(), passthrough.begin(), passthrough.end());
    return out;
}

namespace {

std::string quoted_list(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", '" : "'") + names[i] + "'";
    return out;
}

bool contains(const std::vector<std::string>& v, std::string_view x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

/// Orders `derived` so every component precedes its user (ties keep the
/// given order) and type-checks each body against its components.
void sort_and_check_derived(const std::vector<VariableRecode>& recoded, std::vector<DerivedRecode>& derived) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < derived.size(); ++i) index[derived[i].name()] = i;

    std::vector<std::vector<std::size_t>> deps(derived.size());
    for (std::size_t i = 0; i < derived.size(); ++i) {
        for (const auto& c : derived[i].source.spec.components) {
            if (auto it = index.find(c); it != index.end()) {
                deps[i].push_back(it->second);
            } else if (std::none_of(recoded.begin(), recoded.end(), [&](const VariableRecode& r) { return r.name == c; })) {
                throw plan_error("MissingComponent", "derived variable '" + derived[i].name() + "' needs component '" +
                                                         c + "', which is not a recoded variable of the plan",
                                 derived[i].name() + "/" + c);
            }
        }
    }

    std::vector<bool> placed(derived.size(), false);
    std::vector<DerivedRecode> ordered;
    while (ordered.size() < derived.size()) {
        bool progress = false;
        for (std::size_t i = 0; i < derived.size(); ++i) {
            if (placed[i]) continue;
            if (std::all_of(deps[i].begin(), deps[i].end(), [&](std::size_t d) { return placed[d]; })) {
                placed[i] = true;
                ordered.push_back(derived[i]);
                progress = true;
                break;
            }
        }
        if (!progress) {
            std::vector<std::string> stuck;
            for (std::size_t i = 0; i < derived.size(); ++i) {
                if (!placed[i]) stuck.push_back(derived[i].name());
            }
            throw plan_error("CyclicDerivation", "derived variables form a cycle: " + quoted_list(stuck), join(stuck, ","));
        }
    }

    std::map<std::string, VariableType> types;
    for (const auto& r : recoded) types[r.name] = r.type_end;
    for (auto& d : ordered) {
        try {
            d.body = check_spec(d.source.spec, types);
        } catch (const Error& e) {
            throw plan_error(e.code(), e.what(), d.name());
        }
        types[d.name()] = d.output_type();
    }
    derived = std::move(ordered);
}

void check_output_names(const RecodePlan& plan) {
    std::set<std::string> seen;
    for (const auto& c : plan.output_columns()) {
        if (!seen.insert(c).second) {
            throw plan_error("DuplicateOutputColumn", "column '" + c + "' would appear twice in the output", c);
        }
    }
}

std::optional<OutputValue> constant_output(const RecEnd& rec_end, VariableType type_end) {
    switch (rec_end.kind) {
        case RecEnd::Kind::Category:
            if (type_end == VariableType::Continuous) {
                if (auto n = parse_number(rec_end.text)) return OutputValue::number(*n);
            }
            return OutputValue::category(rec_end.text);
        case RecEnd::Kind::NA:
            return OutputValue::na(rec_end.na_code);
        case RecEnd::Kind::Function:
            return OutputValue::na();
        case RecEnd::Kind::Copy:
            break;
    }
    return std::nullopt;
}

VariableRecode compile_variable(const VariableEntry& entry, const DetailsSheet& ds,
                                const std::vector<std::size_t>& rows, const std::string& database) {
    VariableRecode out;
    out.name = entry.variable;
    std::optional<CompiledRule> else_rule;
    for (std::size_t idx : rows) {
        const DetailsRow& r = ds.rows[idx];
        auto source = r.variable_start.resolve(database);
        if (!source) source = entry.variable_start.resolve(database);
        if (!source) {
            throw plan_error("UnknownVariable", "no source column for '" + entry.variable + "' in database '" + database +
                                                    "' (details row " + std::to_string(idx + 1) + ")",
                             entry.variable);
        }
        if (out.rules.empty() && !else_rule) {
            out.source_column = *source;
            out.type_start = r.type_start;
            out.type_end = r.type_end;
        } else if (*source != out.source_column) {
            throw plan_error("InconsistentSource", "details rows for '" + entry.variable +
                                                       "' read different source columns ('" + out.source_column +
                                                       "' and '" + *source + "')",
                             entry.variable);
        } else if (r.type_end != out.type_end) {
            throw plan_error("InconsistentTypes", "details rows for '" + entry.variable + "' disagree on typeEnd",
                             entry.variable);
        }
        CompiledRule rule{r.rec_start, r.rec_end, r.cat_label, idx + 1, constant_output(r.rec_end, r.type_end)};
        if (r.rec_start.kind == RuleKind::Else) {
            else_rule = std::move(rule);
        } else {
            out.rules.push_back(std::move(rule));
        }
    }
    if (else_rule) out.rules.push_back(std::move(*else_rule));
    return out;
}

}  // namespace

RecodePlan compile_plan(const VariableSheet& vs, const DetailsSheet& ds, const CompileOptions& options) {
    const std::string& db = options.database;
    auto report = validate_sheets(vs, ds);
    if (!report.ok()) {
        for (const auto& f : report.findings) {
            if (f.severity == Severity::Error) {
                throw plan_error("InvalidSheets", "sheets do not validate: " + f.sheet + " row " + std::to_string(f.row) +
                                                      ": " + f.message);
            }
        }
    }

    const bool known_db =
        std::any_of(vs.entries.begin(), vs.entries.end(), [&](const VariableEntry& e) { return contains(e.database_start, db); }) ||
        std::any_of(ds.rows.begin(), ds.rows.end(), [&](const DetailsRow& r) { return contains(r.database_start, db); });
    if (!known_db) throw plan_error("UnknownDatabase", "database '" + db + "' does not appear in the sheets", db);

    RecodePlan plan;
    plan.database = db;
    std::vector<DerivedRecode> derived;
    std::set<std::string> selected_seen;

    for (const auto& name : options.selected) {
        if (!selected_seen.insert(name).second) {
            throw plan_error("DuplicateOutputColumn", "variable '" + name + "' selected twice", name);
        }
        const VariableEntry* entry = vs.find(name);
        if (!entry) throw plan_error("UnknownVariable", "variable '" + name + "' is not in the variable sheet", name);

        std::vector<std::size_t> rows;
        bool derived_rows = entry->variable_start.is_derived();
        for (std::size_t i = 0; i < ds.rows.size(); ++i) {
            if (ds.rows[i].variable == name && contains(ds.rows[i].database_start, db)) {
                rows.push_back(i);
                derived_rows = derived_rows || ds.rows[i].is_derived();
            }
        }
        if (rows.empty() && !contains(entry->database_start, db)) {
            throw plan_error("UnknownVariable", "variable '" + name + "' is not defined for database '" + db + "'", name);
        }

        if (!derived_rows) {
            if (rows.empty()) {
                throw plan_error("UnknownVariable",
                                 "variable '" + name + "' has no details rows for database '" + db + "'", name);
            }
            plan.recoded.push_back(compile_variable(*entry, ds, rows, db));
            continue;
        }

        auto spec_it = std::find_if(options.derived_specs.begin(), options.derived_specs.end(),
                                    [&](const DvlVersion& v) { return v.spec.name == name; });
        if (spec_it == options.derived_specs.end()) {
            throw plan_error("MissingDerivedSpec",
                             "derived variable '" + name + "' has no function body; add it to the derived variable library",
                             name);
        }
        std::vector<std::string> sheet_components = entry->variable_start.derived_components;
        for (std::size_t i : rows) {
            const DetailsRow& r = ds.rows[i];
            if (sheet_components.empty()) sheet_components = r.variable_start.derived_components;
            if (r.rec_end.kind == RecEnd::Kind::Function && !spec_it->spec.function_name.empty() &&
                r.rec_end.text != spec_it->spec.function_name) {
                throw plan_error("DerivedSpecMismatch", "details sheet calls Func::" + r.rec_end.text + " for '" + name +
                                                            "' but the library defines " + spec_it->spec.function_name,
                                 name);
            }
        }
        auto a = sheet_components;
        auto b = spec_it->spec.components;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (!sheet_components.empty() && a != b) {
            throw plan_error("DerivedSpecMismatch", "components of '" + name + "' differ between the sheets (" +
                                                        quoted_list(sheet_components) + ") and the library (" +
                                                        quoted_list(spec_it->spec.components) + ")",
                             name);
        }
        derived.push_back({*spec_it, nullptr});
    }

    sort_and_check_derived(plan.recoded, derived);
    plan.derived = std::move(derived);

    std::set<std::string> pass_seen;
    for (const auto& c : options.passthrough) {
        if (!pass_seen.insert(c).second) {
            throw plan_error("DuplicateOutputColumn", "passthrough column '" + c + "' listed twice", c);
        }
    }
    plan.passthrough = options.passthrough;
    check_output_names(plan);
    return plan;
}

RecodePlan apply_derived(const RecodePlan& plan, const std::vector<DvlVersion>& versions) {
    RecodePlan out = plan;
    for (const auto& v : versions) {
        auto existing = std::find_if(out.derived.begin(), out.derived.end(),
                                     [&](const DerivedRecode& d) { return d.name() == v.spec.name; });
        if (existing != out.derived.end()) {
            *existing = {v, nullptr};
        } else {
            out.derived.push_back({v, nullptr});
        }
    }
    if (versions.empty()) return out;
    sort_and_check_derived(out.recoded, out.derived);
    check_output_names(out);
    return out;
}

RecodePlan apply_from_dvl(const RecodePlan& plan, const DerivedVariableLibrary& lib,
                          const std::vector<std::string>& names) {
    std::vector<DvlVersion> versions;
    for (const auto& name : names) versions.push_back(lib.get(name));
    return apply_derived(plan, versions);
}

std::vector<std::string> expand_passthrough(const std::vector<std::string>& requested,
                                            const std::vector<std::string>& source_columns) {
    std::vector<std::string> out;
    for (const auto& r : requested) {
        if (r == "*") {
            for (const auto& c : source_columns) {
                if (!contains(out, c)) out.push_back(c);
            }
        } else if (!contains(out, r)) {
            out.push_back(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Values and rows

RecodeOutcome recode_value(const VariableRecode& table, std::optional<std::string_view> raw) {
    if (!raw || is_missing(*raw)) return {OutputValue::na(NACode::B), false};
    const std::string_view text = trim(*raw);
    std::optional<double> numeric;
    bool parsed = false;
    auto number = [&]() -> std::optional<double> {
        if (!parsed) {
            numeric = parse_number(text);
            parsed = true;
        }
        return numeric;
    };

    for (const auto& rule : table.rules) {
        const RuleKind kind = rule.match.kind;
        const bool needs_number = kind == RuleKind::Interval || kind == RuleKind::Copy ||
                                  (rule.output.kind == RecEnd::Kind::Copy && table.type_end == VariableType::Continuous);
        const std::optional<double> n = needs_number ? number() : std::nullopt;
        if (!rule.match.matches(text, n)) continue;
        if (rule.constant) return {*rule.constant, false};
        // recEnd copy
        if (table.type_end == VariableType::Continuous) {
            if (!n) continue;
            return {OutputValue::number(*n), false};
        }
        return {OutputValue::copied(std::string(text)), false};
    }
    return {OutputValue::na(NACode::B), true};
}

OutputValue recode_value(const RecodePlan& plan, std::string_view variable, std::optional<std::string_view> raw) {
    const VariableRecode* table = plan.find_recoded(variable);
    if (!table) {
        throw plan_error("UnknownVariable", "variable '" + std::string(variable) + "' is not recoded by this plan",
                         std::string(variable));
    }
    return recode_value(*table, raw).value;
}

const OutputValue& RecodedRow::at(std::string_view column) const {
    for (std::size_t i = 0; i < columns->size(); ++i) {
        if ((*columns)[i] == column) return values[i];
    }
    throw plan_error("UnknownColumn", "row has no column '" + std::string(column) + "'", std::string(column));
}

std::vector<std::string> RecodedRow::render() const {
    std::vector<std::string> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v.render());
    return out;
}

BoundPlan::BoundPlan(const RecodePlan& plan, std::span<const std::string> source_columns)
    : plan_(&plan), columns_(std::make_shared<const std::vector<std::string>>(plan.output_columns())) {
    std::vector<std::string> missing;
    auto locate = [&](const std::string& name) -> std::size_t {
        auto it = std::find(source_columns.begin(), source_columns.end(), name);
        if (it == source_columns.end()) {
            if (!contains(missing, name)) missing.push_back(name);
            return 0;
        }
        return static_cast<std::size_t>(it - source_columns.begin());
    };
    for (const auto& v : plan.recoded) recoded_source_.push_back(locate(v.source_column));
    for (const auto& p : plan.passthrough) passthrough_source_.push_back(locate(p));
    if (!missing.empty()) {
        throw Error(ErrorClass::Plan, "MissingSourceColumn",
                    "source is missing column(s) " + quoted_list(missing) + " (row 0)", "row 0");
    }

    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < plan.recoded.size(); ++i) position[plan.recoded[i].name] = i;
    for (std::size_t j = 0; j < plan.derived.size(); ++j) {
        DerivedSlot slot;
        for (const auto& c : plan.derived[j].source.spec.components) slot.inputs.emplace_back(c, position.at(c));
        derived_slots_.push_back(std::move(slot));
        position[plan.derived[j].name()] = plan.recoded.size() + j;
    }
}

namespace {

/// Exposes only a derived variable's own components.
class SlotBindings final : public expr::Bindings {
public:
    SlotBindings(const std::vector<std::pair<std::string, std::size_t>>& inputs, std::span<const OutputValue> row)
        : inputs_(inputs), row_(row) {}

    const OutputValue* find(std::string_view name) const override {
        for (const auto& [component, pos] : inputs_) {
            if (component == name) return &row_[pos];
        }
        return nullptr;
    }

private:
    const std::vector<std::pair<std::string, std::size_t>>& inputs_;
    std::span<const OutputValue> row_;
};

}  // namespace

void BoundPlan::recode_into(std::span<const std::string> row, std::span<OutputValue> out,
                            std::span<std::uint8_t> unmatched) const {
    const auto& plan = *plan_;
    const std::size_t r = plan.recoded.size();
    for (std::size_t i = 0; i < r; ++i) {
        auto outcome = recode_value(plan.recoded[i], row[recoded_source_[i]]);
        out[i] = std::move(outcome.value);
        if (!unmatched.empty()) unmatched[i] = outcome.unmatched ? 1 : 0;
    }
    for (std::size_t j = 0; j < plan.derived.size(); ++j) {
        SlotBindings bindings(derived_slots_[j].inputs, out);
        out[r + j] = expr::evaluate(*plan.derived[j].body, bindings);
    }
    const std::size_t offset = r + plan.derived.size();
    for (std::size_t k = 0; k < passthrough_source_.size(); ++k) {
        out[offset + k] = OutputValue::copied(row[passthrough_source_[k]]);
    }
}

RecodedRow recode_row(const BoundPlan& bound, std::span<const std::string> row) {
    RecodedRow out{bound.output_columns(), std::vector<OutputValue>(bound.width())};
    bound.recode_into(row, out.values);
    return out;
}

RecodedRow recode_row(const RecodePlan& plan, const std::map<std::string, std::string>& row, std::size_t row_index) {
    std::vector<std::string> columns;
    std::vector<std::string> values;
    for (const auto& [k, v] : row) {
        columns.push_back(k);
        values.push_back(v);
    }
    try {
        BoundPlan bound(plan, columns);
        return recode_row(bound, values);
    } catch (const Error& e) {
        if (e.code() != "MissingSourceColumn") throw;
        std::string msg = e.what();
        msg.replace(msg.rfind("(row 0)"), 7, "(row " + std::to_string(row_index) + ")");
        throw Error(ErrorClass::Plan, "MissingSourceColumn", msg, "row " + std::to_string(row_index));
    }
}

// ---------------------------------------------------------------------------
// Streaming

void NaTally::add(NACode code) noexcept {
    switch (code) {
        case NACode::A: ++a; break;
        case NACode::B: ++b; break;
        case NACode::C: ++c; break;
    }
}

NaTally& NaTally::operator+=(const NaTally& o) noexcept {
    a += o.a;
    b += o.b;
    c += o.c;
    return *this;
}

nlohmann::json to_json(const RunStats& stats) {
    nlohmann::json na = nlohmann::json::object();
    for (const auto& [col, t] : stats.na_counts) {
        na[col] = {{"a", t.a}, {"b", t.b}, {"c", t.c}, {"total", t.total()}};
    }
    nlohmann::json unmatched = nlohmann::json::object();
    for (const auto& [col, n] : stats.unmatched) unmatched[col] = n;
    return {{"rowsIn", stats.rows_in},
            {"rowsOut", stats.rows_out},
            {"columns", stats.columns},
            {"naCounts", na},
            {"unmatched", unmatched}};
}

RunStats recode_stream(const RecodePlan& plan, TabularSource& source, RowSink& sink, const StreamOptions& options) {
    BoundPlan bound(plan, source.columns());
    if (sink.columns() != *bound.output_columns()) {
        throw io_error("ColumnMismatch", "sink columns do not match the plan's output columns");
    }
    RunStats stats;
    stats.columns = *bound.output_columns();
    const std::size_t width = bound.width();

    std::vector<NaTally> na(width);
    std::vector<std::size_t> unmatched(plan.recoded.size(), 0);
    RowBatch batch;
    std::vector<OutputValue> out;
    kernels::BatchTally tally;

    while (source.next_batch(batch)) {
        if (options.parallel) {
            kernels::recode_batch_parallel(bound, batch, out, tally);
        } else {
            kernels::recode_batch_serial(bound, batch, out, tally);
        }
        if (options.strict_unmatched && tally.first_unmatched_row) {
            const std::size_t row = batch.start_index + *tally.first_unmatched_row + 1;
            const auto& var = plan.recoded[tally.first_unmatched_variable];
            const std::size_t src = *source.column_index(var.source_column);
            throw validation_error("UnmatchedValue",
                                   "row " + std::to_string(row) + ": value '" +
                                       batch.row(*tally.first_unmatched_row)[src] + "' of '" + var.source_column +
                                       "' matches no rule for '" + var.name + "'",
                                   "row " + std::to_string(row));
        }
        for (std::size_t c = 0; c < width; ++c) na[c] += tally.na[c];
        for (std::size_t v = 0; v < unmatched.size(); ++v) unmatched[v] += tally.unmatched[v];

        const std::size_t n = batch.size();
        for (std::size_t r = 0; r < n; ++r) {
            sink.write_row(std::span<const OutputValue>(out.data() + r * width, width));
        }
        stats.rows_in += n;
        stats.rows_out += n;
        if (options.progress) options.progress(stats.rows_in);
    }

    for (std::size_t c = 0; c < width; ++c) {
        if (na[c].total()) stats.na_counts[stats.columns[c]] = na[c];
    }
    for (std::size_t v = 0; v < unmatched.size(); ++v) {
        if (unmatched[v]) stats.unmatched[plan.recoded[v].name] = unmatched[v];
    }
    return stats;
}

}  // namespace harmonize
