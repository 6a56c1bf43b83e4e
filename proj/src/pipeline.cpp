#include "harmonize/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "harmonize/error.hpp"
#include "harmonize/hash.hpp"
#include "harmonize/text.hpp"

namespace harmonize {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("NotFound", "cannot open '" + path.string() + "'", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("WriteFailed", "cannot write '" + path.string() + "'", path.string());
    out << text;
    out.close();
    if (!out) throw io_error("WriteFailed", "cannot write '" + path.string() + "'", path.string());
}

nlohmann::json read_json_file(const fs::path& path) {
    const std::string text = read_text_file(path);
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw io_error("BadFormat", "'" + path.string() + "' is not valid JSON", path.string());
    return j;
}

SheetInput read_sheet_file(const fs::path& path) { return {read_text_file(path), path}; }

void resolve_derived(RecodeJob& job, const DerivedVariableLibrary& lib, const std::vector<std::string>& derive_names) {
    for (const auto& name : job.selected) {
        try {
            job.derived_specs.push_back(lib.get(name));
        } catch (const Error& e) {
            if (e.code() != "UnknownName") throw;
        }
    }
    for (const auto& name : derive_names) job.derive.push_back(lib.get(name));
}

std::string output_fingerprint(DataFormat format, const fs::path& out, const std::string& table) {
    if (format == DataFormat::Sqlite) return sha256_hex(sqlite_table_as_csv(out, table));
    return sha256_file_hex(out);
}

namespace {

nlohmann::json sheet_json(const SheetInput& s) {
    return {{"path", s.path ? nlohmann::json(s.path->string()) : nlohmann::json(nullptr)}, {"sha256", sha256_hex(s.text)}};
}

nlohmann::json dvl_entry(const DvlVersion& v) {
    return {{"name", v.spec.name}, {"version", v.version}, {"contentHash", v.content_hash}};
}

}  // namespace

RecodeResult run_recode(const RecodeJob& job) {
    const std::string started = utc_timestamp();
    VariableSheet vs = parse_variable_sheet(job.variables.text);
    DetailsSheet ds = parse_details_sheet(job.details.text);

    auto source = open_source(job.source);
    CompileOptions co;
    co.database = job.database;
    co.selected = job.selected;
    co.passthrough = expand_passthrough(job.passthrough, source->columns());
    co.derived_specs = job.derived_specs;
    RecodePlan plan = apply_derived(compile_plan(vs, ds, co), job.derive);

    const std::string source_hash = sha256_file_hex(job.source.location);
    const auto source_size = fs::file_size(job.source.location);

    RecodeResult result;
    {
        auto sink = open_sink(job.out_format, job.out, job.out_table, plan.output_columns());
        try {
            result.stats = recode_stream(plan, *source, *sink, {job.strict_unmatched, job.parallel, job.progress});
            sink->close();
        } catch (...) {
            sink.reset();
            if (job.out_format == DataFormat::Csv) {
                std::error_code ec;
                fs::remove(job.out, ec);
            }
            throw;
        }
    }
    result.output_sha256 = output_fingerprint(job.out_format, job.out, job.out_table);

    nlohmann::json derived = nlohmann::json::array();
    for (const auto& d : plan.derived) derived.push_back(dvl_entry(d.source));
    nlohmann::json derive_names = nlohmann::json::array();
    for (const auto& d : job.derive) derive_names.push_back(d.spec.name);

    result.manifest = {
        {"schemaVersion", kManifestSchemaVersion},
        {"engineVersion", HARMONIZE_VERSION},
        {"startedAt", started},
        {"finishedAt", utc_timestamp()},
        {"sheets", {{"variables", sheet_json(job.variables)}, {"details", sheet_json(job.details)}}},
        {"source",
         {{"path", job.source.location.string()},
          {"format", to_string(job.source.format)},
          {"table", job.source.table},
          {"size", source_size},
          {"sha256", source_hash}}},
        {"database", job.database},
        {"selected", job.selected},
        {"passthrough", job.passthrough},
        {"derive", derive_names},
        {"dvl",
         {{"dir", job.dvl_dir ? nlohmann::json(job.dvl_dir->string()) : nlohmann::json(nullptr)},
          {"entries", derived}}},
        {"strictUnmatched", job.strict_unmatched},
        {"chunkSize", job.source.chunk_size},
        {"output",
         {{"path", job.out.string()},
          {"format", to_string(job.out_format)},
          {"table", job.out_table},
          {"sha256", result.output_sha256}}},
        {"stats", to_json(result.stats)},
    };
    return result;
}

namespace {

void expect_hash(const std::string& what, const fs::path& path, const std::string& expected) {
    const std::string actual = sha256_file_hex(path);
    if (actual != expected) {
        throw validation_error("InputChanged", what + " '" + path.string() + "' changed since the manifest was written",
                               path.string());
    }
}

SheetInput sheet_from_manifest(const nlohmann::json& j, const std::string& what) {
    if (j.at("path").is_null()) {
        throw validation_error("InputChanged", "manifest does not record a path for the " + what + " sheet");
    }
    fs::path p = j.at("path").get<std::string>();
    expect_hash(what + " sheet", p, j.at("sha256").get<std::string>());
    return read_sheet_file(p);
}

}  // namespace

RecodeJob job_from_manifest(const nlohmann::json& m) {
    try {
        if (m.at("schemaVersion").get<int>() != kManifestSchemaVersion) {
            throw validation_error("BadFormat", "unsupported manifest schemaVersion");
        }
        RecodeJob job;
        job.variables = sheet_from_manifest(m.at("sheets").at("variables"), "variables");
        job.details = sheet_from_manifest(m.at("sheets").at("details"), "details");

        const auto& src = m.at("source");
        job.source.location = src.at("path").get<std::string>();
        job.source.format = parse_data_format(src.at("format").get<std::string>());
        job.source.table = src.at("table").get<std::string>();
        job.source.chunk_size = m.value("chunkSize", kDefaultChunkSize);
        expect_hash("source", job.source.location, src.at("sha256").get<std::string>());

        job.database = m.at("database").get<std::string>();
        job.selected = m.at("selected").get<std::vector<std::string>>();
        job.passthrough = m.at("passthrough").get<std::vector<std::string>>();
        job.strict_unmatched = m.at("strictUnmatched").get<bool>();

        const auto& dvl = m.at("dvl");
        const auto derive_names = m.at("derive").get<std::vector<std::string>>();
        if (!dvl.at("entries").empty()) {
            if (dvl.at("dir").is_null()) {
                throw validation_error("InputChanged", "manifest uses derived variables but records no library directory");
            }
            job.dvl_dir = fs::path(dvl.at("dir").get<std::string>());
            const auto lib = DerivedVariableLibrary::load(*job.dvl_dir);
            for (const auto& e : dvl.at("entries")) {
                const auto hash = e.at("contentHash").get<std::string>();
                const DvlVersion* v = lib.find_hash(hash);
                if (!v) {
                    throw plan_error("UnknownName", "library has no spec with hash " + hash + " ('" +
                                                        e.at("name").get<std::string>() + "')",
                                     hash);
                }
                const bool extra = std::find(derive_names.begin(), derive_names.end(), v->spec.name) != derive_names.end();
                (extra ? job.derive : job.derived_specs).push_back(*v);
            }
        }

        const auto& out = m.at("output");
        job.out = out.at("path").get<std::string>();
        job.out_format = parse_data_format(out.at("format").get<std::string>());
        job.out_table = out.at("table").get<std::string>();
        return job;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("BadFormat", std::string("malformed manifest: ") + e.what());
    }
}

ReplayResult replay(const nlohmann::json& manifest, const std::optional<fs::path>& out) {
    RecodeJob job = job_from_manifest(manifest);
    if (out) job.out = *out;
    auto result = run_recode(job);
    return {manifest.at("output").at("sha256").get<std::string>(), result.output_sha256};
}

}  // namespace harmonize
