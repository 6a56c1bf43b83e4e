#include "harmonize/service.hpp"

#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "httplib.h"

#include "harmonize/dvl.hpp"
#include "harmonize/error.hpp"
#include "harmonize/expr.hpp"
#include "harmonize/pipeline.hpp"
#include "harmonize/recode.hpp"
#include "harmonize/summarize.hpp"
#include "harmonize/text.hpp"

namespace harmonize {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

json to_json(const ValidationReport& report) {
    json findings = json::array();
    for (const auto& f : report.findings) {
        findings.push_back({{"severity", f.severity == Severity::Error ? "error" : "warning"},
                            {"sheet", f.sheet},
                            {"row", f.row},
                            {"column", f.column},
                            {"message", f.message}});
    }
    return {{"ok", report.ok()},
            {"errorCount", report.error_count()},
            {"warningCount", report.warning_count()},
            {"findings", findings}};
}

namespace {

enum class JobState { Queued, Running, Succeeded, Failed };

std::string_view to_string(JobState s) {
    switch (s) {
        case JobState::Queued: return "queued";
        case JobState::Running: return "running";
        case JobState::Succeeded: return "succeeded";
        case JobState::Failed: return "failed";
    }
    return "failed";
}

struct Job {
    std::string id;
    std::string session_id;
    fs::path out;
    DataFormat out_format = DataFormat::Csv;
    std::optional<std::size_t> rows_total;
    std::atomic<std::size_t> rows_done{0};
    std::atomic<JobState> state{JobState::Queued};

    std::mutex m;  // guards the fields below
    json stats;
    json error;
    std::string output_sha256;
    std::vector<DvlVersion> derived_used;
    std::thread worker;
};

struct Session {
    std::string id;
    std::string name;
    SourceOptions source;
    std::vector<std::string> columns;
    std::optional<std::size_t> row_count_hint;
    std::optional<fs::path> upload;
    Clock::time_point last_used = Clock::now();

    std::mutex m;  // guards the fields below
    VariableSheet variables;
    DetailsSheet details;
    std::shared_ptr<Job> last_job;
};

Error not_found(std::string code, const std::string& what) { return io_error(std::move(code), what + " not found", what); }

int status_for(const Error& e) {
    static const std::set<std::string> missing{"NotFound",    "UnknownColumn", "UnknownName", "UnknownSession",
                                               "UnknownJob",  "UnknownTable",  "UnknownRow"};
    if (missing.count(e.code())) return 404;
    if (e.code() == "JobRunning" || e.code() == "JobNotFinished") return 409;
    if (e.code() == "PayloadTooLarge") return 413;
    switch (e.error_class()) {
        case ErrorClass::Validation: return 400;
        case ErrorClass::Io: return 400;
        case ErrorClass::Plan: return 422;
        case ErrorClass::Internal: return 500;
    }
    return 500;
}

json error_body(const std::string& code, const std::string& message, const std::string& location) {
    json j = {{"code", code}, {"message", message}};
    j["location"] = location.empty() ? json(nullptr) : json(location);
    return j;
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const Error& e) {
    send_json(res, status, error_body(e.code(), e.what(), e.location()));
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw validation_error("BadFormat", "request body must be a JSON object");
    return j;
}

std::vector<std::string> string_list(const json& body, const char* key) {
    if (!body.contains(key) || body[key].is_null()) return {};
    const auto& v = body[key];
    if (v.is_string()) return split_trimmed(v.get<std::string>(), ',');
    if (!v.is_array()) throw validation_error("BadValue", std::string("'") + key + "' must be a list of strings", key);
    std::vector<std::string> out;
    for (const auto& x : v) {
        if (!x.is_string()) throw validation_error("BadValue", std::string("'") + key + "' must be a list of strings", key);
        out.push_back(x.get<std::string>());
    }
    return out;
}

std::string random_token() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    static const char* hex = "0123456789abcdef";
    std::string out(24, '0');
    for (auto& c : out) c = hex[rng() & 15];
    return out;
}

json version_json(const DvlVersion& v) {
    json j = to_json(v.spec);
    j["version"] = v.version;
    j["contentHash"] = v.content_hash;
    j["author"] = v.author;
    j["createdAt"] = v.created_at;
    return j;
}

}  // namespace

struct Service::Impl {
    ServiceOptions options;
    httplib::Server server;

    std::mutex sessions_m;
    std::map<std::string, std::shared_ptr<Session>> sessions;
    std::mutex jobs_m;
    std::map<std::string, std::shared_ptr<Job>> jobs;
    std::mutex dvl_m;
    DerivedVariableLibrary dvl;

    explicit Impl(ServiceOptions o) : options(std::move(o)) {
        fs::create_directories(options.work_dir / "uploads");
        fs::create_directories(options.work_dir / "jobs");
        if (options.dvl_dir && fs::exists(*options.dvl_dir / "catalog.csv")) {
            dvl = DerivedVariableLibrary::load(*options.dvl_dir);
        }
        server.set_payload_max_length(options.max_upload_bytes + (1 << 20));
        // httplib answers some failures itself (oversized bodies, unknown
        // routes) with an empty body; give those the usual error shape.
        server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
            if (!res.body.empty()) return;
            switch (res.status) {
                case 404: send_json(res, 404, error_body("NotFound", "no route for " + req.method + " " + req.path, "")); break;
                case 413: send_json(res, 413, error_body("PayloadTooLarge", "request body too large", "")); break;
                default:
                    send_json(res, res.status, error_body("HttpError", httplib::status_message(res.status), ""));
                    break;
            }
        });
        routes();
    }

    ~Impl() {
        server.stop();
        std::vector<std::shared_ptr<Job>> all;
        {
            std::lock_guard lock(jobs_m);
            for (auto& [_, j] : jobs) all.push_back(j);
        }
        for (auto& j : all) {
            if (j->worker.joinable()) j->worker.join();
        }
    }

    template <class F>
    static void guarded(httplib::Response& res, F&& f) {
        try {
            f();
        } catch (const Error& e) {
            send_error(res, status_for(e), e);
        } catch (const json::exception& e) {
            send_json(res, 400, error_body("BadFormat", e.what(), ""));
        } catch (const std::exception& e) {
            send_json(res, 500, error_body("Internal", e.what(), ""));
        }
    }

    void sweep() {
        const auto now = Clock::now();
        std::lock_guard lock(sessions_m);
        for (auto it = sessions.begin(); it != sessions.end();) {
            auto& s = *it->second;
            bool busy = false;
            {
                std::lock_guard sl(s.m);
                busy = s.last_job && s.last_job->state.load() == JobState::Running;
            }
            if (!busy && now - s.last_used > options.session_ttl) {
                if (s.upload) {
                    std::error_code ec;
                    fs::remove(*s.upload, ec);
                }
                it = sessions.erase(it);
            } else {
                ++it;
            }
        }
    }

    std::shared_ptr<Session> session(const std::string& id) {
        sweep();
        std::lock_guard lock(sessions_m);
        auto it = sessions.find(id);
        if (it == sessions.end()) throw not_found("UnknownSession", "session '" + id + "'");
        it->second->last_used = Clock::now();
        return it->second;
    }

    std::shared_ptr<Job> job(const std::string& id) {
        std::lock_guard lock(jobs_m);
        auto it = jobs.find(id);
        if (it == jobs.end()) throw not_found("UnknownJob", "job '" + id + "'");
        return it->second;
    }

    // POST /sessions
    void open_session(const httplib::Request& req, httplib::Response& res) {
        sweep();
        auto s = std::make_shared<Session>();
        s->id = random_token();
        std::string format;
        std::string location;
        std::optional<std::string> upload;
        if (req.is_multipart_form_data()) {
            auto field = [&](const char* k) { return req.has_file(k) ? req.get_file_value(k).content : std::string(); };
            format = field("format");
            s->source.table = field("table");
            s->name = field("name");
            if (req.has_file("file")) {
                upload = req.get_file_value("file").content;
                if (format.empty()) format = to_string(format_from_path(req.get_file_value("file").filename));
            }
            location = field("location");
        } else {
            json body = parse_body(req);
            format = body.value("format", "");
            location = body.value("location", "");
            s->source.table = body.value("table", "");
            s->name = body.value("name", "");
            if (body.contains("upload")) upload = body.at("upload").get<std::string>();
        }
        if (format.empty()) throw validation_error("BadFormat", "'format' is required", "format");
        s->source.format = parse_data_format(format);
        if (upload) {
            if (upload->size() > options.max_upload_bytes) {
                throw io_error("PayloadTooLarge", "upload exceeds " + std::to_string(options.max_upload_bytes) +
                                                      " bytes; connect to the file or database by location instead");
            }
            fs::path p = options.work_dir / "uploads" / (s->id + (s->source.format == DataFormat::Sqlite ? ".db" : ".csv"));
            write_text_file(p, *upload);
            s->upload = p;
            s->source.location = p;
        } else {
            if (location.empty()) throw validation_error("BadFormat", "either 'location' or 'upload' is required", "location");
            s->source.location = location;
        }
        if (s->name.empty()) s->name = s->source.location.stem().string();
        s->source.dataset_name = s->name;
        try {
            auto src = open_source(s->source);
            s->columns = src->columns();
            s->row_count_hint = src->row_count_hint();
        } catch (...) {
            if (s->upload) fs::remove(*s->upload);
            throw;
        }
        {
            std::lock_guard lock(sessions_m);
            sessions[s->id] = s;
        }
        json j = {{"sessionId", s->id}, {"name", s->name}, {"format", to_string(s->source.format)}, {"columns", s->columns}};
        j["rowCountHint"] = s->row_count_hint ? json(*s->row_count_hint) : json(nullptr);
        send_json(res, 201, j);
    }

    void session_info(const std::string& id, httplib::Response& res) {
        auto s = session(id);
        std::lock_guard lock(s->m);
        json j = {{"sessionId", s->id},
                  {"name", s->name},
                  {"format", to_string(s->source.format)},
                  {"columns", s->columns},
                  {"variables", s->variables.entries.size()},
                  {"detailsRows", s->details.rows.size()}};
        j["lastJob"] = s->last_job ? json(s->last_job->id) : json(nullptr);
        send_json(res, 200, j);
    }

    void close_session(const std::string& id, httplib::Response& res) {
        auto s = session(id);
        {
            std::lock_guard sl(s->m);
            if (s->last_job && s->last_job->state.load() == JobState::Running) {
                throw validation_error("JobRunning", "session has a running recode job", s->last_job->id);
            }
        }
        {
            std::lock_guard lock(sessions_m);
            sessions.erase(id);
        }
        if (s->upload) {
            std::error_code ec;
            fs::remove(*s->upload, ec);
        }
        res.status = 204;
    }

    void summary(const httplib::Request& req, httplib::Response& res) {
        auto s = session(req.path_params.at("id"));
        std::size_t k = kDefaultTopCategories;
        if (req.has_param("k")) {
            auto n = parse_number(req.get_param_value("k"));
            if (!n || *n < 0 || *n != static_cast<double>(static_cast<std::size_t>(*n))) {
                throw validation_error("BadValue", "k must be a non-negative integer", "k");
            }
            k = static_cast<std::size_t>(*n);
        }
        auto src = open_source(s->source);
        send_json(res, 200, to_json(summarize_variable(*src, req.path_params.at("column"), k)));
    }

    json report_for(Session& s) { return to_json(validate_sheets(s.variables, s.details)); }

    void get_sheet(const httplib::Request& req, httplib::Response& res) {
        auto s = session(req.path_params.at("id"));
        const auto& kind = req.path_params.at("kind");
        std::lock_guard lock(s->m);
        if (kind == "variables") {
            res.set_content(serialize_variable_sheet(s->variables), "text/csv");
        } else if (kind == "details") {
            res.set_content(serialize_details_sheet(s->details), "text/csv");
        } else {
            throw not_found("NotFound", "sheet '" + kind + "'");
        }
    }

    void put_sheet(const httplib::Request& req, httplib::Response& res) {
        auto s = session(req.path_params.at("id"));
        const auto& kind = req.path_params.at("kind");
        if (kind != "variables" && kind != "details") throw not_found("NotFound", "sheet '" + kind + "'");
        std::lock_guard lock(s->m);
        try {
            if (kind == "variables") {
                s->variables = parse_variable_sheet(req.body);
            } else {
                s->details = parse_details_sheet(req.body);
            }
        } catch (const Error& e) {
            send_error(res, 422, e);
            return;
        }
        send_json(res, 200, {{"report", report_for(*s)}});
    }

    void add_details_row(const httplib::Request& req, httplib::Response& res) {
        auto s = session(req.path_params.at("id"));
        json body = parse_body(req);
        const json& spec = body.contains("rowSpec") ? body.at("rowSpec") : body;
        if (!spec.is_object()) throw validation_error("BadValue", "rowSpec must be an object", "rowSpec");
        std::vector<std::pair<std::string, std::string>> cells;
        for (const auto& [k, v] : spec.items()) {
            cells.emplace_back(k, v.is_string() ? v.get<std::string>() : (v.is_null() ? std::string() : v.dump()));
        }
        std::lock_guard lock(s->m);
        DetailsRow row;
        try {
            row = make_details_row(cells, s->details.extra_columns, s->details.rows.size() + 1);
        } catch (const Error& e) {
            send_error(res, 422, e);
            return;
        }
        s->details.rows.push_back(row);
        DetailsSheet single{s->details.extra_columns, {row}};
        send_json(res, 201, {{"index", s->details.rows.size()},
                             {"row", serialize_details_sheet(single)},
                             {"report", report_for(*s)}});
    }

    void delete_details_row(const httplib::Request& req, httplib::Response& res) {
        auto s = session(req.path_params.at("id"));
        auto n = parse_number(req.path_params.at("index"));
        if (!n || *n < 0 || *n != static_cast<double>(static_cast<std::size_t>(*n))) {
            throw validation_error("BadValue", "row index must be a non-negative integer", "index");
        }
        const auto index = static_cast<std::size_t>(*n);
        std::lock_guard lock(s->m);
        if (index > s->details.rows.size()) {
            throw not_found("UnknownRow", "details row " + std::to_string(index));
        }
        if (index > 0) s->details.rows.erase(s->details.rows.begin() + static_cast<long>(index - 1));
        send_json(res, 200, {{"removed", index > 0}, {"rows", s->details.rows.size()}, {"report", report_for(*s)}});
    }

    void start_recode(const httplib::Request& req, httplib::Response& res) {
        auto s = session(req.path_params.at("id"));
        json body = parse_body(req);

        RecodeJob rj;
        rj.source = s->source;
        if (body.contains("chunkSize") && !body["chunkSize"].is_null()) {
            const auto n = body["chunkSize"].get<long long>();
            if (n < 1) throw validation_error("BadValue", "chunkSize must be positive", "chunkSize");
            rj.source.chunk_size = static_cast<std::size_t>(n);
        }
        rj.database = body.value("database", s->name);
        rj.selected = string_list(body, "selected");
        rj.passthrough = string_list(body, "passthrough");
        rj.strict_unmatched = body.value("strictUnmatched", false);
        rj.out_format = parse_data_format(body.value("outputFormat", "csv"));
        {
            std::lock_guard lock(dvl_m);
            resolve_derived(rj, dvl, string_list(body, "dvlNames"));
            rj.dvl_dir = options.dvl_dir;
        }

        auto j = std::make_shared<Job>();
        j->id = random_token();
        j->session_id = s->id;
        j->out_format = rj.out_format;
        j->out = options.work_dir / "jobs" / (j->id + (rj.out_format == DataFormat::Sqlite ? ".db" : ".csv"));
        j->rows_total = s->row_count_hint;
        rj.out = j->out;

        {
            std::lock_guard lock(s->m);
            if (s->last_job && (s->last_job->state.load() == JobState::Running ||
                                s->last_job->state.load() == JobState::Queued)) {
                throw validation_error("JobRunning", "session already has a running recode job", s->last_job->id);
            }
            rj.variables.text = serialize_variable_sheet(s->variables);
            rj.details.text = serialize_details_sheet(s->details);
            // compile now so plan errors come back with the request
            CompileOptions co{rj.database, rj.selected, expand_passthrough(rj.passthrough, s->columns), rj.derived_specs};
            apply_derived(compile_plan(s->variables, s->details, co), rj.derive);
            s->last_job = j;
        }
        {
            std::lock_guard lock(jobs_m);
            jobs[j->id] = j;
        }
        rj.progress = [j](std::size_t done) { j->rows_done.store(done); };
        j->worker = std::thread([j, rj = std::move(rj)]() mutable {
            j->state = JobState::Running;
            try {
                auto result = run_recode(rj);
                std::lock_guard lock(j->m);
                j->stats = to_json(result.stats);
                j->output_sha256 = result.output_sha256;
                for (const auto& e : result.manifest["dvl"]["entries"]) {
                    const auto hash = e.at("contentHash").get<std::string>();
                    for (const auto* list : {&rj.derived_specs, &rj.derive}) {
                        for (const auto& v : *list) {
                            if (v.content_hash == hash) j->derived_used.push_back(v);
                        }
                    }
                }
                j->state = JobState::Succeeded;
            } catch (const Error& e) {
                std::lock_guard lock(j->m);
                j->error = error_body(e.code(), e.what(), e.location());
                j->state = JobState::Failed;
            } catch (const std::exception& e) {
                std::lock_guard lock(j->m);
                j->error = error_body("Internal", e.what(), "");
                j->state = JobState::Failed;
            }
        });
        send_json(res, 202, {{"jobId", j->id}});
    }

    void job_status(const std::string& id, httplib::Response& res) {
        auto j = job(id);
        const JobState state = j->state.load();
        json out = {{"jobId", j->id}, {"sessionId", j->session_id}, {"state", to_string(state)}};
        json progress = {{"rowsDone", j->rows_done.load()}};
        progress["rowsTotal"] = j->rows_total ? json(*j->rows_total) : json(nullptr);
        out["progress"] = progress;
        std::lock_guard lock(j->m);
        out["stats"] = j->stats;
        out["error"] = j->error;
        out["outputSha256"] = j->output_sha256.empty() ? json(nullptr) : json(j->output_sha256);
        send_json(res, 200, out);
    }

    void job_result(const std::string& id, httplib::Response& res) {
        auto j = job(id);
        const JobState state = j->state.load();
        if (state == JobState::Failed) {
            std::lock_guard lock(j->m);
            send_json(res, 409, j->error);
            return;
        }
        if (state != JobState::Succeeded) throw validation_error("JobNotFinished", "job has not finished", id);
        auto size = fs::file_size(j->out);
        auto path = j->out;
        const bool sqlite = j->out_format == DataFormat::Sqlite;
        res.set_header("Content-Disposition", std::string("attachment; filename=\"recoded") + (sqlite ? ".db" : ".csv") + "\"");
        res.set_content_provider(
            size, sqlite ? "application/vnd.sqlite3" : "text/csv",
            [path](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                std::ifstream in(path, std::ios::binary);
                in.seekg(static_cast<std::streamoff>(offset));
                std::vector<char> buf(std::min<std::size_t>(length, 1 << 20));
                in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
                sink.write(buf.data(), static_cast<std::size_t>(in.gcount()));
                return in.gcount() > 0;
            });
    }

    void derived_doc(const std::string& id, httplib::Response& res) {
        auto s = session(id);
        std::map<std::string, DvlVersion> used;
        {
            std::lock_guard sl(s->m);
            std::lock_guard dl(dvl_m);
            for (const auto& row : s->details.rows) {
                if (!row.is_derived() || used.count(row.variable)) continue;
                try {
                    used.emplace(row.variable, dvl.get(row.variable));
                } catch (const Error&) {
                }
            }
            if (s->last_job && s->last_job->state.load() == JobState::Succeeded) {
                std::lock_guard jl(s->last_job->m);
                for (const auto& v : s->last_job->derived_used) used.insert_or_assign(v.spec.name, v);
            }
        }
        std::vector<DvlVersion> versions;
        for (auto& [_, v] : used) versions.push_back(v);
        res.set_header("Content-Disposition", "attachment; filename=\"derived_variables.csv\"");
        res.set_content(export_documentation(versions), "text/csv");
    }

    void dvl_add(const httplib::Request& req, httplib::Response& res) {
        json body = parse_body(req);
        const json& spec_json = body.contains("spec") ? body.at("spec") : body;
        DerivedVariableSpec spec = spec_from_json(spec_json);
        std::lock_guard lock(dvl_m);
        auto r = dvl.add(spec, body.value("author", ""), body.value("createdAt", ""));
        if (options.dvl_dir && !r.duplicate) dvl.save(*options.dvl_dir);
        send_json(res, r.duplicate ? 200 : 201,
                  {{"name", spec.name}, {"contentHash", r.content_hash}, {"version", r.version}, {"duplicate", r.duplicate}});
    }

    void dvl_list(httplib::Response& res) {
        std::lock_guard lock(dvl_m);
        json out = json::array();
        for (const auto& e : dvl.list()) {
            out.push_back({{"name", e.name},
                           {"versions", e.versions},
                           {"latestHash", e.latest_hash},
                           {"functionName", e.function_name},
                           {"outputType", to_string(e.output_type)}});
        }
        send_json(res, 200, out);
    }

    void dvl_show(const httplib::Request& req, httplib::Response& res) {
        std::optional<int> version;
        if (req.has_param("version")) {
            auto n = parse_number(req.get_param_value("version"));
            if (!n) throw validation_error("BadValue", "version must be an integer", "version");
            version = static_cast<int>(*n);
        }
        std::lock_guard lock(dvl_m);
        send_json(res, 200, version_json(dvl.get(req.path_params.at("name"), version)));
    }

    void expr_parse(const httplib::Request& req, httplib::Response& res) {
        json body = parse_body(req);
        const std::string src = body.value("expression", "");
        expr::ExprPtr e;
        try {
            e = expr::parse_expression(src);
        } catch (const Error& err) {
            send_error(res, 422, err);
            return;
        }
        json out = {{"ast", expr::to_string(*e)}, {"identifiers", expr::identifiers(*e)}};
        if (body.contains("components")) {
            std::map<std::string, VariableType> types;
            for (const auto& [k, v] : body["components"].items()) {
                auto t = parse_variable_type(v.get<std::string>());
                if (!t) throw validation_error("BadType", "unknown type for component '" + k + "'", k);
                types[k] = *t;
            }
            try {
                out["type"] = to_string(expr::check_expr(*e, types));
            } catch (const Error& err) {
                send_error(res, 422, err);
                return;
            }
        }
        send_json(res, 200, out);
    }

    void routes() {
        auto& s = server;
        s.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { open_session(req, res); });
        });
        s.Get("/sessions/:id", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { session_info(req.path_params.at("id"), res); });
        });
        s.Delete("/sessions/:id", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { close_session(req.path_params.at("id"), res); });
        });
        s.Get("/sessions/:id/summary/:column", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { summary(req, res); });
        });
        s.Get("/sessions/:id/sheets/:kind", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { get_sheet(req, res); });
        });
        s.Put("/sessions/:id/sheets/:kind", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { put_sheet(req, res); });
        });
        s.Post("/sessions/:id/details-rows", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { add_details_row(req, res); });
        });
        s.Delete("/sessions/:id/details-rows/:index", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { delete_details_row(req, res); });
        });
        s.Post("/sessions/:id/recode", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { start_recode(req, res); });
        });
        s.Get("/sessions/:id/derived-doc", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { derived_doc(req.path_params.at("id"), res); });
        });
        s.Get("/jobs/:id", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { job_status(req.path_params.at("id"), res); });
        });
        s.Get("/jobs/:id/result", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { job_result(req.path_params.at("id"), res); });
        });
        s.Post("/dvl", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { dvl_add(req, res); });
        });
        s.Get("/dvl", [this](const httplib::Request&, httplib::Response& res) { guarded(res, [&] { dvl_list(res); }); });
        s.Get("/dvl/:name", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { dvl_show(req, res); });
        });
        s.Post("/expr/parse", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { expr_parse(req, res); });
        });
        s.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"status", "ok"}, {"version", HARMONIZE_VERSION}});
        });
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}
Service::~Service() = default;

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int Service::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }
void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }
void Service::stop() { impl_->server.stop(); }

}  // namespace harmonize
