#include "harmonize/dvl.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "harmonize/csv.hpp"
#include "harmonize/error.hpp"
#include "harmonize/hash.hpp"
#include "harmonize/text.hpp"

namespace harmonize {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const DerivedVariableSpec& spec) {
    return json{{"name", spec.name},
                {"components", spec.components},
                {"functionName", spec.function_name},
                {"functionBody", spec.function_body},
                {"outputType", std::string(to_string(spec.output_type))},
                {"notes", spec.notes}};
}

std::string canonical_json(const DerivedVariableSpec& spec, bool with_notes) {
    json j = to_json(spec);
    if (!with_notes) j.erase("notes");
    // nlohmann's default object is an ordered std::map, so keys come out sorted.
    return j.dump();
}

DerivedVariableSpec spec_from_json(const json& j) {
    if (!j.is_object()) throw validation_error("BadValue", "derived variable spec must be a JSON object");
    DerivedVariableSpec spec;
    try {
        spec.name = j.at("name").get<std::string>();
        spec.components = j.at("components").get<std::vector<std::string>>();
        spec.function_name = j.value("functionName", std::string());
        spec.function_body = j.at("functionBody").get<std::string>();
        auto type = parse_variable_type(j.at("outputType").get<std::string>());
        if (!type) throw validation_error("BadType", "outputType must be categorical or continuous");
        spec.output_type = *type;
        spec.notes = j.value("notes", std::string());
    } catch (const json::exception& e) {
        throw validation_error("BadValue", std::string("malformed derived variable spec: ") + e.what());
    }
    return spec;
}

std::string content_hash(const DerivedVariableSpec& spec) { return sha256_hex(canonical_json(spec, false)); }

expr::ExprPtr check_spec_shape(const DerivedVariableSpec& spec) {
    if (trim(spec.name).empty()) throw validation_error("BadValue", "derived variable name is empty");
    if (spec.components.empty()) {
        throw validation_error("BadValue", "derived variable '" + spec.name + "' needs at least one component");
    }
    std::set<std::string> seen;
    for (const auto& c : spec.components) {
        if (trim(c).empty()) throw validation_error("BadValue", "empty component in '" + spec.name + "'");
        if (!seen.insert(c).second) {
            throw validation_error("BadValue", "component '" + c + "' repeated in '" + spec.name + "'");
        }
    }
    auto body = expr::parse_expression(spec.function_body);
    for (const auto& id : expr::identifiers(*body)) {
        if (!seen.contains(id)) {
            throw validation_error("UnboundIdent",
                                   "'" + id + "' in the body of '" + spec.name + "' is not one of its components");
        }
    }
    return body;
}

expr::ExprPtr check_spec(const DerivedVariableSpec& spec, const std::map<std::string, VariableType>& component_types) {
    auto body = check_spec_shape(spec);
    std::map<std::string, VariableType> scoped;
    for (const auto& c : spec.components) {
        auto it = component_types.find(c);
        if (it == component_types.end()) {
            throw plan_error("MissingComponent", "derived variable '" + spec.name + "' needs component '" + c + "'");
        }
        scoped.emplace(c, it->second);
    }
    auto type = expr::check_expr(*body, scoped);
    if (type != spec.output_type) {
        throw validation_error("TypeError", "derived variable '" + spec.name + "' declares " +
                                                std::string(to_string(spec.output_type)) + " but its body is " +
                                                std::string(to_string(type)));
    }
    return body;
}

namespace {

// Specs do not record component types; accept when some assignment works.
void check_some_typing(const DerivedVariableSpec& spec) {
    auto body = check_spec_shape(spec);
    const std::size_t n = spec.components.size();
    if (n > 16) throw validation_error("BadValue", "derived variable '" + spec.name + "' has more than 16 components");
    std::string last_error;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::map<std::string, VariableType> types;
        for (std::size_t i = 0; i < n; ++i) {
            types[spec.components[i]] = (mask >> i) & 1u ? VariableType::Continuous : VariableType::Categorical;
        }
        try {
            if (expr::check_expr(*body, types) == spec.output_type) return;
            last_error = "body never produces a " + std::string(to_string(spec.output_type)) + " value";
        } catch (const Error& e) {
            last_error = e.what();
        }
    }
    throw validation_error("TypeError", "derived variable '" + spec.name + "' does not type-check: " + last_error);
}

}  // namespace

DvlAddResult DerivedVariableLibrary::add(const DerivedVariableSpec& spec, const std::string& author,
                                         const std::string& created_at) {
    check_some_typing(spec);
    return insert(spec, content_hash(spec), author, created_at.empty() ? utc_timestamp() : created_at);
}

DvlAddResult DerivedVariableLibrary::insert(const DerivedVariableSpec& spec, const std::string& hash,
                                            const std::string& author, const std::string& created_at) {
    auto& versions = entries_[spec.name];
    for (const auto& v : versions) {
        if (v.content_hash == hash) return {hash, v.version, true};
    }
    DvlVersion v{spec, static_cast<int>(versions.size()) + 1, hash, author, created_at};
    versions.push_back(std::move(v));
    return {hash, versions.back().version, false};
}

const DvlVersion& DerivedVariableLibrary::get(std::string_view name, std::optional<int> version) const {
    auto it = entries_.find(std::string(name));
    if (it == entries_.end() || it->second.empty()) {
        throw validation_error("UnknownName", "no derived variable named '" + std::string(name) + "' in the library");
    }
    if (!version) return it->second.back();
    if (*version < 1 || *version > static_cast<int>(it->second.size())) {
        throw validation_error("UnknownName",
                               "derived variable '" + std::string(name) + "' has no version " + std::to_string(*version));
    }
    return it->second[static_cast<std::size_t>(*version - 1)];
}

const DvlVersion* DerivedVariableLibrary::find_hash(std::string_view hash) const {
    for (const auto& [name, versions] : entries_) {
        for (const auto& v : versions) {
            if (v.content_hash == hash) return &v;
        }
    }
    return nullptr;
}

std::vector<CatalogEntry> DerivedVariableLibrary::list() const {
    std::vector<CatalogEntry> out;
    for (const auto& [name, versions] : entries_) {
        if (versions.empty()) continue;
        const auto& latest = versions.back();
        out.push_back({name, static_cast<int>(versions.size()), latest.content_hash, latest.spec.function_name,
                       latest.spec.output_type});
    }
    return out;
}

std::vector<DvlVersion> DerivedVariableLibrary::all_versions() const {
    std::vector<DvlVersion> out;
    for (const auto& [name, versions] : entries_) out.insert(out.end(), versions.begin(), versions.end());
    return out;
}

namespace {

const std::vector<std::string> kCatalogColumns = {"name", "version", "contentHash", "author",
                                                  "createdAt", "functionName", "outputType", "components"};

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw io_error("NotFound", "cannot read " + p.string(), p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_atomic(const fs::path& p, const std::string& text) {
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("IoError", "cannot write " + tmp.string(), tmp.string());
        out << text;
        if (!out) throw io_error("IoError", "failed writing " + tmp.string(), tmp.string());
    }
    fs::rename(tmp, p);
}

std::map<std::string, std::size_t> column_index(const std::vector<std::string>& header,
                                                const std::vector<std::string>& required, const std::string& what) {
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < header.size(); ++i) idx[std::string(trim(header[i]))] = i;
    for (const auto& r : required) {
        if (!idx.contains(r)) throw validation_error("MissingColumn", what + " is missing column '" + r + "'");
    }
    return idx;
}

}  // namespace

DerivedVariableLibrary DerivedVariableLibrary::load(const fs::path& dir) {
    DerivedVariableLibrary lib;
    const fs::path catalog = dir / "catalog.csv";
    if (!fs::exists(catalog)) {
        if (fs::is_directory(dir)) return lib;
        throw io_error("NotFound", "no derived variable library at " + dir.string(), dir.string());
    }
    auto rows = csv::parse_document(read_text(catalog));
    if (rows.empty()) return lib;
    auto idx = column_index(rows.front(), kCatalogColumns, "catalog.csv");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r];
        auto cell = [&](const char* c) { return idx[c] < f.size() ? f[idx[c]] : std::string(); };
        if (std::all_of(f.begin(), f.end(), [](const std::string& s) { return trim(s).empty(); })) continue;
        const std::string hash = cell("contentHash");
        auto spec = spec_from_json(json::parse(read_text(dir / "specs" / (hash + ".json"))));
        if (content_hash(spec) != hash || spec.name != cell("name")) {
            throw validation_error("HashMismatch", "catalog row " + std::to_string(r) + " does not match specs/" +
                                                       hash + ".json");
        }
        auto res = lib.insert(spec, hash, cell("author"), cell("createdAt"));
        if (std::to_string(res.version) != trim(cell("version"))) {
            throw validation_error("BadValue", "catalog.csv versions for '" + spec.name + "' are not consecutive");
        }
    }
    return lib;
}

void DerivedVariableLibrary::save(const fs::path& dir) const {
    fs::create_directories(dir / "specs");
    std::ostringstream catalog;
    csv::write_row(catalog, kCatalogColumns);
    for (const auto& [name, versions] : entries_) {
        for (const auto& v : versions) {
            const fs::path spec_file = dir / "specs" / (v.content_hash + ".json");
            const std::string body = canonical_json(v.spec, true);
            if (!fs::exists(spec_file)) write_text_atomic(spec_file, body);
            csv::write_row(catalog, std::vector<std::string>{name, std::to_string(v.version), v.content_hash, v.author,
                                                            v.created_at, v.spec.function_name,
                                                            std::string(to_string(v.spec.output_type)),
                                                            join(v.spec.components, ", ")});
        }
    }
    write_text_atomic(dir / "catalog.csv", catalog.str());
}

const std::vector<std::string>& documentation_columns() {
    static const std::vector<std::string> cols = {"name", "components", "functionName", "functionBody",
                                                  "outputType", "contentHash", "author", "createdAt"};
    return cols;
}

std::string export_documentation(std::span<const DvlVersion> versions) {
    std::ostringstream out;
    csv::write_row(out, documentation_columns());
    for (const auto& v : versions) {
        csv::write_row(out, std::vector<std::string>{v.spec.name, join(v.spec.components, ", "), v.spec.function_name,
                                                     v.spec.function_body, std::string(to_string(v.spec.output_type)),
                                                     v.content_hash, v.author, v.created_at});
    }
    return out.str();
}

std::string export_documentation(const DerivedVariableLibrary& lib) {
    auto all = lib.all_versions();
    return export_documentation(std::span<const DvlVersion>(all));
}

std::vector<DvlAddResult> import_documentation(DerivedVariableLibrary& lib, std::string_view csv_text) {
    auto rows = csv::parse_document(csv_text);
    if (rows.empty()) throw validation_error("MissingColumn", "documentation CSV has no header row");
    auto idx = column_index(rows.front(), documentation_columns(), "documentation CSV");
    std::vector<DvlAddResult> results;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r];
        if (std::all_of(f.begin(), f.end(), [](const std::string& s) { return trim(s).empty(); })) continue;
        auto cell = [&](const char* c) { return idx[c] < f.size() ? f[idx[c]] : std::string(); };
        DerivedVariableSpec spec;
        spec.name = std::string(trim(cell("name")));
        spec.components = split_trimmed(cell("components"), ',');
        spec.function_name = std::string(trim(cell("functionName")));
        spec.function_body = cell("functionBody");
        auto type = parse_variable_type(cell("outputType"));
        if (!type) throw validation_error("BadType", "documentation row " + std::to_string(r) + ": bad outputType");
        spec.output_type = *type;
        check_some_typing(spec);
        const std::string hash = content_hash(spec);
        if (hash != trim(cell("contentHash"))) {
            throw validation_error("HashMismatch", "documentation row " + std::to_string(r) + " ('" + spec.name +
                                                       "') has a contentHash that does not match its spec");
        }
        results.push_back(lib.insert(spec, hash, cell("author"), cell("createdAt")));
    }
    return results;
}

}  // namespace harmonize
