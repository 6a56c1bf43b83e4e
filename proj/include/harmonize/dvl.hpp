#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "harmonize/expr.hpp"
#include "harmonize/sheet_model.hpp"

namespace harmonize {

/// A named row-wise expression over recoded variables.
struct DerivedVariableSpec {
    std::string name;
    std::vector<std::string> components;
    std::string function_name;
    std::string function_body;
    VariableType output_type = VariableType::Categorical;
    std::string notes;

    bool operator==(const DerivedVariableSpec&) const = default;
};

/// Canonical JSON (sorted keys, compact). `with_notes` adds the notes field,
/// which is stored but not part of the content hash.
std::string canonical_json(const DerivedVariableSpec& spec, bool with_notes = false);
DerivedVariableSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DerivedVariableSpec& spec);

std::string content_hash(const DerivedVariableSpec& spec);

/// Structural checks shared by the library and plan compilation: nonempty,
/// duplicate-free components; the body parses; every identifier is a
/// component. Returns the parsed body.
expr::ExprPtr check_spec_shape(const DerivedVariableSpec& spec);

/// Full check against known component types; throws on type errors or a
/// result type different from spec.output_type.
expr::ExprPtr check_spec(const DerivedVariableSpec& spec, const std::map<std::string, VariableType>& component_types);

struct DvlVersion {
    DerivedVariableSpec spec;
    int version = 0;  // 1-based, per name
    std::string content_hash;
    std::string author;
    std::string created_at;

    bool operator==(const DvlVersion&) const = default;
};

struct DvlAddResult {
    std::string content_hash;
    int version = 0;
    bool duplicate = false;  // DuplicateHash: nothing was added
};

struct CatalogEntry {
    std::string name;
    int versions = 0;
    std::string latest_hash;
    std::string function_name;
    VariableType output_type = VariableType::Categorical;

    bool operator==(const CatalogEntry&) const = default;
};

/// Append-only, versioned store of derived-variable specs. Mutations are not
/// synchronised; callers that share a library across threads serialise writes.
class DerivedVariableLibrary {
public:
    /// Adds a version. Identical content (same hash) is an idempotent no-op.
    DvlAddResult add(const DerivedVariableSpec& spec, const std::string& author,
                     const std::string& created_at = {});

    /// Latest version when `version` is empty. Throws Error{UnknownName}.
    const DvlVersion& get(std::string_view name, std::optional<int> version = std::nullopt) const;
    const DvlVersion* find_hash(std::string_view hash) const;

    std::vector<CatalogEntry> list() const;
    /// Every version, ordered by name then version.
    std::vector<DvlVersion> all_versions() const;
    bool empty() const noexcept { return entries_.empty(); }

    /// Directory layout: catalog.csv + specs/<hash>.json.
    static DerivedVariableLibrary load(const std::filesystem::path& dir);
    void save(const std::filesystem::path& dir) const;

    bool operator==(const DerivedVariableLibrary&) const = default;

private:
    friend std::vector<DvlAddResult> import_documentation(DerivedVariableLibrary& lib, std::string_view csv_text);

    DvlAddResult insert(const DerivedVariableSpec& spec, const std::string& hash, const std::string& author,
                        const std::string& created_at);

    std::map<std::string, std::vector<DvlVersion>> entries_;
};

/// Columns of the derived-variables documentation CSV.
const std::vector<std::string>& documentation_columns();

std::string export_documentation(std::span<const DvlVersion> versions);
std::string export_documentation(const DerivedVariableLibrary& lib);

/// Adds every documented version to `lib`, keeping author and createdAt.
/// Throws Error{HashMismatch} when a row's contentHash disagrees with its spec.
std::vector<DvlAddResult> import_documentation(DerivedVariableLibrary& lib, std::string_view csv_text);

}  // namespace harmonize
