// Command-line front end: validate, summarize, recode, replay, dvl, serve.
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "harmonize/dvl.hpp"
#include "harmonize/error.hpp"
#include "harmonize/io.hpp"
#include "harmonize/pipeline.hpp"
#include "harmonize/service.hpp"
#include "harmonize/summarize.hpp"
#include "harmonize/text.hpp"

namespace fs = std::filesystem;
using namespace harmonize;
using json = nlohmann::json;

namespace {

struct SourceArgs {
    std::string path;
    std::string format;
    std::string table;
    std::size_t chunk_size = kDefaultChunkSize;

    void add(CLI::App* cmd) {
        cmd->add_option("--source", path, "CSV file or sqlite database")->required();
        cmd->add_option("--format", format, "csv or sqlite (default: from the extension)");
        cmd->add_option("--table", table, "table name for sqlite sources");
        cmd->add_option("--chunk-size", chunk_size, "rows per batch")->check(CLI::PositiveNumber);
    }

    SourceOptions options() const {
        SourceOptions o;
        o.location = path;
        o.format = format.empty() ? format_from_path(path) : parse_data_format(format);
        o.table = table;
        o.chunk_size = chunk_size;
        if (o.format == DataFormat::Sqlite && o.table.empty()) {
            throw validation_error("BadValue", "--table is required for sqlite sources", "--table");
        }
        return o;
    }
};

std::vector<std::string> split_list(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (const auto& a : args) {
        for (auto& s : split_trimmed(a, ',')) {
            if (!s.empty()) out.push_back(s);
        }
    }
    return out;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

Service* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metadata-driven recoding of tabular datasets"};
    app.set_config("--config", "", "TOML/INI file with default option values");
    app.set_version_flag("--version", std::string(HARMONIZE_VERSION));
    app.require_subcommand(1);

    // validate
    auto* validate = app.add_subcommand("validate", "check a variable sheet and details sheet");
    std::string vs_path, ds_path;
    bool as_json = false;
    validate->add_option("--variables", vs_path)->required();
    validate->add_option("--details", ds_path)->required();
    validate->add_flag("--json", as_json);

    // summarize
    auto* summarize = app.add_subcommand("summarize", "summarize one column of a source");
    SourceArgs sum_src;
    sum_src.add(summarize);
    std::string column;
    std::size_t top_k = kDefaultTopCategories;
    summarize->add_option("--column", column)->required();
    summarize->add_option("-k,--top", top_k, "number of top categories");
    summarize->add_flag("--json", as_json);

    // missing
    auto* missing = app.add_subcommand("missing", "count missing cells in a source");
    SourceArgs miss_src;
    miss_src.add(missing);
    missing->add_flag("--json", as_json);

    // recode
    auto* recode = app.add_subcommand("recode", "recode a source with a pair of sheets");
    SourceArgs rec_src;
    rec_src.add(recode);
    std::string database, out_path, out_format, out_table = "recoded", manifest_path, stats_path, doc_path, dvl_dir;
    std::vector<std::string> select, passthrough, derive;
    bool strict = false, serial = false;
    recode->add_option("--variables", vs_path)->required();
    recode->add_option("--details", ds_path)->required();
    recode->add_option("--database", database, "database name used in databaseStart")->required();
    recode->add_option("--select", select, "variables to recode (comma separated)")->required();
    recode->add_option("--passthrough", passthrough, "source columns to copy; '*' for all");
    recode->add_option("--out", out_path)->required();
    recode->add_option("--out-format", out_format, "csv or sqlite (default: from the extension)");
    recode->add_option("--out-table", out_table, "table name for sqlite output");
    recode->add_option("--dvl", dvl_dir, "derived variable library directory");
    recode->add_option("--derive", derive, "extra derived variables from the library");
    recode->add_flag("--strict-unmatched", strict, "fail on values no rule matches");
    recode->add_flag("--serial", serial, "use the single-threaded kernel");
    recode->add_option("--manifest", manifest_path, "run manifest (default: <out>.manifest.json)");
    recode->add_option("--stats", stats_path, "run statistics (default: <out>.stats.json)");
    recode->add_option("--doc", doc_path, "write the derived-variable documentation CSV");

    // replay
    auto* replay_cmd = app.add_subcommand("replay", "re-run a recode from its manifest and compare hashes");
    std::string replay_out;
    replay_cmd->add_option("--manifest", manifest_path)->required();
    replay_cmd->add_option("--out", replay_out, "output path (default: the recorded one)");

    // dvl
    auto* dvl = app.add_subcommand("dvl", "manage a derived variable library");
    dvl->require_subcommand(1);
    auto* dvl_add = dvl->add_subcommand("add", "add a derived variable version");
    DerivedVariableSpec spec;
    std::string components, output_type = "categorical", author, created_at;
    dvl_add->add_option("--dir", dvl_dir)->required();
    dvl_add->add_option("--name", spec.name)->required();
    dvl_add->add_option("--components", components)->required();
    dvl_add->add_option("--function-name", spec.function_name);
    dvl_add->add_option("--body", spec.function_body)->required();
    dvl_add->add_option("--output-type", output_type);
    dvl_add->add_option("--author", author);
    dvl_add->add_option("--notes", spec.notes);
    dvl_add->add_option("--created-at", created_at, "timestamp to record (default: now)");
    auto* dvl_list = dvl->add_subcommand("list", "list library entries");
    dvl_list->add_option("--dir", dvl_dir)->required();
    dvl_list->add_flag("--json", as_json);
    auto* dvl_show = dvl->add_subcommand("show", "print one version as JSON");
    std::string show_name;
    int show_version = 0;
    dvl_show->add_option("--dir", dvl_dir)->required();
    dvl_show->add_option("--name", show_name)->required();
    dvl_show->add_option("--version", show_version, "default: latest");
    auto* dvl_export = dvl->add_subcommand("export", "write the documentation CSV");
    std::vector<std::string> export_names;
    dvl_export->add_option("--dir", dvl_dir)->required();
    dvl_export->add_option("--names", export_names, "latest versions of these names only");
    dvl_export->add_option("--out", doc_path, "default: stdout");
    auto* dvl_import = dvl->add_subcommand("import", "add every version from a documentation CSV");
    dvl_import->add_option("--dir", dvl_dir)->required();
    dvl_import->add_option("--doc", doc_path)->required();

    // serve
    auto* serve = app.add_subcommand("serve", "run the HTTP API");
    std::string host = "127.0.0.1", work_dir;
    int port = 8080;
    serve->add_option("--host", host)->envname("HARMONIZE_HOST");
    serve->add_option("--port", port)->envname("HARMONIZE_PORT");
    serve->add_option("--dvl", dvl_dir);
    serve->add_option("--work-dir", work_dir, "uploads and job outputs (default: a temp directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ErrorClass::Validation);
    }

    try {
        if (*validate) {
            auto report = validate_sheets(parse_variable_sheet(read_text_file(vs_path)),
                                          parse_details_sheet(read_text_file(ds_path)));
            if (as_json) {
                print_json(to_json(report));
            } else {
                std::cout << to_text(report);
            }
            return report.ok() ? 0 : static_cast<int>(ErrorClass::Validation);
        }

        if (*summarize) {
            auto src = open_source(sum_src.options());
            auto s = summarize_variable(*src, column, top_k);
            if (as_json) {
                print_json(to_json(s));
                return 0;
            }
            std::cout << s.name << " (" << to_string(s.sniffed_type) << ")\n"
                      << "  rows " << s.n_rows << ", missing " << s.n_missing << ", distinct " << s.distinct_count
                      << "\n";
            if (s.numeric) {
                std::cout << "  min " << format_number(s.numeric->min) << ", max " << format_number(s.numeric->max)
                          << ", mean " << format_number(s.numeric->mean) << ", median "
                          << format_number(s.numeric->median) << "\n";
            }
            for (const auto& [v, n] : s.top_categories) std::cout << "  " << v << "\t" << n << "\n";
            return 0;
        }

        if (*missing) {
            auto src = open_source(miss_src.options());
            auto m = count_missing(*src);
            if (as_json) {
                print_json({{"missing", m.missing}, {"cells", m.cells}, {"rows", m.rows}, {"fraction", m.fraction()}});
            } else {
                std::cout << m.missing << " of " << m.cells << " cells missing (" << format_number(m.fraction() * 100)
                          << "%) over " << m.rows << " rows\n";
            }
            return 0;
        }

        if (*recode) {
            RecodeJob job;
            job.variables = read_sheet_file(vs_path);
            job.details = read_sheet_file(ds_path);
            job.source = rec_src.options();
            job.database = database;
            job.selected = split_list(select);
            job.passthrough = split_list(passthrough);
            job.strict_unmatched = strict;
            job.parallel = !serial;
            job.out = out_path;
            job.out_format = out_format.empty() ? format_from_path(out_path) : parse_data_format(out_format);
            job.out_table = out_table;
            const auto derive_names = split_list(derive);
            if (!dvl_dir.empty()) {
                job.dvl_dir = dvl_dir;
                resolve_derived(job, DerivedVariableLibrary::load(dvl_dir), derive_names);
            } else if (!derive_names.empty()) {
                throw validation_error("BadValue", "--derive needs --dvl", "--derive");
            }
            auto result = run_recode(job);
            write_text_file(stats_path.empty() ? out_path + ".stats.json" : stats_path, to_json(result.stats).dump(2) + "\n");
            write_text_file(manifest_path.empty() ? out_path + ".manifest.json" : manifest_path,
                            result.manifest.dump(2) + "\n");
            if (!doc_path.empty()) {
                std::vector<DvlVersion> used;
                for (const auto* list : {&job.derived_specs, &job.derive}) {
                    for (const auto& v : *list) {
                        for (const auto& e : result.manifest["dvl"]["entries"]) {
                            if (e["contentHash"] == v.content_hash) used.push_back(v);
                        }
                    }
                }
                write_text_file(doc_path, export_documentation(used));
            }
            std::cerr << "recoded " << result.stats.rows_out << " rows into " << out_path << " (sha256 "
                      << result.output_sha256 << ")\n";
            return 0;
        }

        if (*replay_cmd) {
            auto manifest = read_json_file(manifest_path);
            std::optional<fs::path> out;
            if (!replay_out.empty()) out = replay_out;
            auto r = replay(manifest, out);
            std::cout << "expected " << r.expected_sha256 << "\nactual   " << r.actual_sha256 << "\n"
                      << (r.matches() ? "match" : "MISMATCH") << "\n";
            return r.matches() ? 0 : static_cast<int>(ErrorClass::Validation);
        }

        if (*dvl_add) {
            auto t = parse_variable_type(output_type);
            if (!t) throw validation_error("BadType", "--output-type must be categorical or continuous", "--output-type");
            spec.output_type = *t;
            spec.components = split_trimmed(components, ',');
            DerivedVariableLibrary lib;
            if (fs::exists(fs::path(dvl_dir) / "catalog.csv")) lib = DerivedVariableLibrary::load(dvl_dir);
            auto r = lib.add(spec, author, created_at);
            if (!r.duplicate) lib.save(dvl_dir);
            print_json({{"name", spec.name}, {"contentHash", r.content_hash}, {"version", r.version}, {"duplicate", r.duplicate}});
            return 0;
        }
        if (*dvl_list) {
            auto lib = DerivedVariableLibrary::load(dvl_dir);
            json out = json::array();
            for (const auto& e : lib.list()) {
                if (!as_json) {
                    std::cout << e.name << "\tv" << e.versions << "\t" << to_string(e.output_type) << "\t"
                              << e.latest_hash << "\n";
                }
                out.push_back({{"name", e.name},
                               {"versions", e.versions},
                               {"latestHash", e.latest_hash},
                               {"functionName", e.function_name},
                               {"outputType", to_string(e.output_type)}});
            }
            if (as_json) print_json(out);
            return 0;
        }
        if (*dvl_show) {
            auto lib = DerivedVariableLibrary::load(dvl_dir);
            const auto& v = lib.get(show_name, show_version > 0 ? std::optional<int>(show_version) : std::nullopt);
            json j = to_json(v.spec);
            j["version"] = v.version;
            j["contentHash"] = v.content_hash;
            j["author"] = v.author;
            j["createdAt"] = v.created_at;
            print_json(j);
            return 0;
        }
        if (*dvl_export) {
            auto lib = DerivedVariableLibrary::load(dvl_dir);
            std::string text;
            if (export_names.empty()) {
                text = export_documentation(lib);
            } else {
                std::vector<DvlVersion> versions;
                for (const auto& n : split_list(export_names)) versions.push_back(lib.get(n));
                text = export_documentation(versions);
            }
            if (doc_path.empty()) {
                std::cout << text;
            } else {
                write_text_file(doc_path, text);
            }
            return 0;
        }
        if (*dvl_import) {
            DerivedVariableLibrary lib;
            if (fs::exists(fs::path(dvl_dir) / "catalog.csv")) lib = DerivedVariableLibrary::load(dvl_dir);
            auto results = import_documentation(lib, read_text_file(doc_path));
            lib.save(dvl_dir);
            std::size_t added = 0;
            for (const auto& r : results) added += r.duplicate ? 0 : 1;
            std::cout << "imported " << added << " new version(s), " << results.size() - added << " already present\n";
            return 0;
        }

        if (*serve) {
            ServiceOptions o;
            o.work_dir = work_dir.empty() ? fs::temp_directory_path() / ("harmonize-" + std::to_string(::getpid()))
                                          : fs::path(work_dir);
            if (!dvl_dir.empty()) o.dvl_dir = dvl_dir;
            Service service(o);
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on http://" << host << ":" << port << "\n";
            if (!service.listen(host, port)) {
                g_service = nullptr;
                throw io_error("ListenFailed", "cannot listen on " + host + ":" + std::to_string(port));
            }
            g_service = nullptr;
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what();
        if (!e.location().empty()) std::cerr << " (at " << e.location() << ")";
        std::cerr << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return static_cast<int>(ErrorClass::Internal);
    }
    return 0;
}
