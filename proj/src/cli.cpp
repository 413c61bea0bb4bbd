#include "jsonreward/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "jsonreward/curation.hpp"
#include "jsonreward/reward.hpp"
#include "jsonreward/rng.hpp"
#include "jsonreward/taskgen.hpp"
#include "jsonreward/toolconv.hpp"
#include "jsonreward/validator.hpp"

namespace jsonreward::cli {

namespace {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Records held in memory at once, per command.
constexpr std::size_t kChunk = 1024;

struct Line {
    std::size_t number = 0;
    std::string text;
};

bool read_chunk(std::istream& in, std::size_t& line_no, std::vector<Line>& out, std::size_t limit = kChunk) {
    out.clear();
    std::string s;
    while (out.size() < limit && std::getline(in, s)) {
        ++line_no;
        if (!s.empty() && s.back() == '\r') s.pop_back();
        if (s.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back({line_no, std::move(s)});
    }
    if (in.bad()) throw IoError("read failed");
    return !out.empty();
}

std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

void write_line(std::ostream& out, const std::string& s) {
    out << s << '\n';
    if (!out) throw IoError("write failed");
}

Json echo_error(const Line& line, const std::string& message) {
    Json rec = Json::parse(line.text, nullptr, false);
    if (rec.is_object()) {
        rec["error"] = message;
        return rec;
    }
    return {{"line", line.number}, {"raw", line.text}, {"error", message}};
}

Json record_id(const Json& rec, const Line& line) {
    if (auto it = rec.find("id"); it != rec.end()) return *it;
    return line.number;
}

const std::string& text_field(const Json& rec) {
    auto it = rec.find("text");
    if (it == rec.end() || !it->is_string()) throw std::invalid_argument("record needs a string \"text\"");
    return it->get_ref<const std::string&>();
}

Json category_json(const std::optional<FailureCategory>& c) {
    return c ? Json(std::string(to_string(*c))) : Json();
}

class Input {
   public:
    Input(const std::string& path, std::istream& std_in) {
        if (path == "-") {
            stream_ = &std_in;
            return;
        }
        file_.open(path, std::ios::binary);
        if (!file_) throw IoError("cannot open " + path);
        stream_ = &file_;
    }
    std::istream& get() { return *stream_; }

   private:
    std::ifstream file_;
    std::istream* stream_ = nullptr;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return buf.str();
}

// A path, or inline JSON when the argument starts like a schema.
SchemaDoc load_schema(const std::string& arg) {
    std::string text;
    Resolver resolver;
    if (!arg.empty() && (arg.front() == '{' || arg == "true" || arg == "false")) {
        text = arg;
    } else {
        text = read_file(arg);
        resolver = DirectoryResolver(fs::absolute(arg).parent_path());
    }
    auto compiled = compile_text(text, resolver);
    if (!compiled) throw UsageError("schema " + arg + ": " + compiled.error().reason);
    return std::move(compiled).value();
}

/// One output record per input record, in order. Each chunk is processed
/// in parallel.
template <class F>
void map_records(std::istream& in, std::ostream& out, F&& fn) {
    std::vector<Line> chunk;
    std::vector<std::string> results;
    std::size_t line_no = 0;
    while (read_chunk(in, line_no, chunk)) {
        results.assign(chunk.size(), std::string());
        const auto n = static_cast<long long>(chunk.size());
#pragma omp parallel for schedule(dynamic, 8)
        for (long long i = 0; i < n; ++i) {
            const Line& line = chunk[static_cast<std::size_t>(i)];
            Json result;
            try {
                result = fn(Json::parse(line.text), line);
            } catch (const std::exception& e) {
                result = echo_error(line, e.what());
            } catch (...) {
                result = echo_error(line, "unknown error");
            }
            results[static_cast<std::size_t>(i)] = dump(result);
        }
        for (const auto& r : results) write_line(out, r);
    }
}

// Sums per-schema statistics so the corpus need not be held in memory.
class StatsAccumulator {
   public:
    void add(const SchemaDoc& doc) {
        const auto one = corpus_stats(std::span<const SchemaDoc>(&doc, 1));
        ++count_;
        src_ += one.mean_source_len;
        desc_ += one.mean_desc_len;
        depth_ += one.mean_depth;
        u2_ += one.under_2k;
        u4_ += one.under_4k;
        u10_ += one.under_10k;
    }
    bool empty() const { return count_ == 0; }
    CorpusStats result() const {
        CorpusStats s;
        s.count = count_;
        if (count_ == 0) return s;
        const auto n      = static_cast<double>(count_);
        s.mean_source_len = src_ / n;
        s.mean_desc_len   = desc_ / n;
        s.mean_depth      = depth_ / n;
        s.under_2k        = u2_;
        s.under_4k        = u4_;
        s.under_10k       = u10_;
        return s;
    }

   private:
    std::size_t count_ = 0;
    double src_ = 0, desc_ = 0, depth_ = 0;
    std::size_t u2_ = 0, u4_ = 0, u10_ = 0;
};

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& schema_arg, const std::string& input, std::istream& std_in, std::ostream& out) {
    const SchemaDoc schema = load_schema(schema_arg);
    Input in(input, std_in);
    map_records(in.get(), out, [&](const Json& rec, const Line& line) {
        const auto parsed = parse(text_field(rec), Dialect::Json);
        Json v = {{"id", record_id(rec, line)}};
        if (!parsed) {
            v["valid"]    = false;
            v["category"] = std::string(to_string(classify(parsed.failure())));
            v["violations"] = 0;
            return v;
        }
        const auto report = validate(parsed.tree(), schema);
        v["valid"]        = report.empty();
        v["category"]     = report.empty() ? Json() : Json(std::string(to_string(classify(report))));
        v["violations"]   = report.size();
        return v;
    });
    return kExitOk;
}

int cmd_score(const std::string& schema_arg, const std::string& input, bool tos, std::istream& std_in,
              std::ostream& out) {
    const SchemaDoc schema = load_schema(schema_arg);
    const ScoreMode mode   = tos ? ScoreMode::ToS : ScoreMode::Strict;
    Input in(input, std_in);
    map_records(in.get(), out, [&](const Json& rec, const Line& line) {
        const auto s = fine_grained_score(text_field(rec), schema, mode);
        return Json{{"id", record_id(rec, line)},
                    {"ratio", s.ratio},
                    {"total_tokens", s.total_tokens},
                    {"correct_tokens", s.correct_tokens},
                    {"padded_tokens", s.padded_tokens},
                    {"parse_ok", s.parse_ok},
                    {"schema_ok", s.schema_ok},
                    {"category", category_json(s.category)}};
    });
    return kExitOk;
}

double finite_field(const Json& rec, const char* key) {
    auto it = rec.find(key);
    if (it == rec.end() || !it->is_number()) throw std::invalid_argument(std::string("record needs a numeric \"") + key + "\"");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("\"") + key + "\" must be finite");
    return v;
}

int cmd_advantages(const std::string& input, std::size_t k, std::optional<double> epsilon, std::istream& std_in,
                   std::ostream& out) {
    if (k < 2) throw UsageError("--k must be at least 2");
    std::optional<ClipConfig> clip;
    if (epsilon) {
        try {
            clip.emplace(*epsilon);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--epsilon: ") + e.what());
        }
    }
    Input in(input, std_in);
    std::vector<Line> group;
    std::size_t line_no = 0, group_no = 0;
    while (read_chunk(in.get(), line_no, group, k)) {
        if (group.size() < k) {
            for (const auto& l : group) {
                write_line(out, dump(echo_error(l, "incomplete group of " + std::to_string(group.size()) +
                                                       " records (k = " + std::to_string(k) + ")")));
            }
            break;
        }
        std::vector<Json> recs(k);
        std::vector<std::string> errors(k);
        std::vector<double> rewards(k), model(k), ratios(k);
        bool has_model = true, bad = false;
        for (std::size_t i = 0; i < k; ++i) {
            try {
                recs[i]    = Json::parse(group[i].text);
                rewards[i] = finite_field(recs[i], "reward");
                if (recs[i].contains("model_reward")) {
                    model[i] = finite_field(recs[i], "model_reward");
                } else {
                    has_model = false;
                }
                if (clip) {
                    ratios[i] = finite_field(recs[i], "ratio");
                    if (ratios[i] <= 0) throw std::invalid_argument("\"ratio\" must be positive");
                }
            } catch (const std::exception& e) {
                errors[i] = e.what();
                bad       = true;
            }
        }
        if (bad) {
            for (std::size_t i = 0; i < k; ++i) {
                const std::string msg =
                    errors[i].empty() ? "group " + std::to_string(group_no) + " has a malformed record" : errors[i];
                write_line(out, dump(echo_error(group[i], msg)));
            }
            ++group_no;
            continue;
        }
        const auto validator_adv = rloo_advantages(rewards);
        std::vector<double> adv  = validator_adv;
        std::vector<double> model_adv;
        if (has_model) {
            model_adv = rloo_advantages(model);
            adv       = combine_advantages(validator_adv, model_adv);
        }
        for (std::size_t i = 0; i < k; ++i) {
            Json o;
            if (recs[i].contains("id")) o["id"] = recs[i]["id"];
            o["group"]     = group_no;
            o["reward"]    = rewards[i];
            o["advantage"] = adv[i];
            if (has_model) {
                o["validator_advantage"] = validator_adv[i];
                o["model_advantage"]     = model_adv[i];
            }
            if (clip) o["clip_term"] = ppo_clip_term(ratios[i], adv[i], *clip);
            write_line(out, dump(o));
        }
        ++group_no;
    }
    return kExitOk;
}

std::vector<fs::path> list_files(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(dir, ec); !ec && it != fs::recursive_directory_iterator();
         it.increment(ec)) {
        if (it->is_regular_file()) files.push_back(it->path());
    }
    if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());
    return files;
}

int cmd_taskgen(const std::string& kind_name, const std::string& dir, std::uint64_t seed, std::size_t n,
                std::size_t max_fields, std::ostream& out, std::ostream& err) {
    const auto kind = task_kind_from_string(kind_name);
    if (!kind || *kind == TaskKind::Reasoning) throw UsageError("--kind must be complex, custom or escape");
    if (max_fields == 0) throw UsageError("--max-fields must be positive");

    struct Source {
        std::string id;
        SchemaDoc schema;
    };
    std::vector<Source> sources;
    const DirectoryResolver resolver(dir);
    for (const auto& path : list_files(dir)) {
        const std::string id = fs::relative(path, dir).generic_string();
        auto rec = curate_one({id, read_file(path)}, resolver);
        if (!rec.final_schema) {
            err << "skipping " << id << ": " << (rec.reasons.empty() ? "not usable" : rec.reasons.front()) << '\n';
            continue;
        }
        auto doc = compile(*rec.final_schema).value();
        if (*kind != TaskKind::ComplexSchema && plain_string_fields(doc).empty()) continue;
        sources.push_back({id, std::move(doc)});
    }
    if (sources.empty()) throw UsageError("no usable schema in " + dir + " for kind " + kind_name);

    const CustomFormatsConfig config{max_fields};
    std::vector<std::string> results;
    for (std::size_t base = 0; base < n; base += kChunk) {
        const std::size_t m = std::min(kChunk, n - base);
        results.assign(m, std::string());
#pragma omp parallel for schedule(dynamic, 4)
        for (long long j = 0; j < static_cast<long long>(m); ++j) {
            const std::size_t i     = base + static_cast<std::size_t>(j);
            const Source& src       = sources[i % sources.size()];
            const std::uint64_t s   = derive_seed(seed, i);
            const std::string id    = "t" + std::to_string(i);
            Json rec;
            try {
                TaskResult t = *kind == TaskKind::ComplexSchema ? TaskResult(gen_complex(src.schema))
                               : *kind == TaskKind::CustomFormats ? gen_custom_formats(src.schema, s, config)
                                                                 : gen_escape(src.schema, s);
                if (t) {
                    t.value().seed = s;
                    rec            = t.value().to_json(id);
                    rec["source"]  = src.id;
                } else {
                    rec = {{"id", id}, {"source", src.id}, {"error", t.error().reason}};
                }
            } catch (const std::exception& e) {
                rec = {{"id", id}, {"source", src.id}, {"error", e.what()}};
            }
            results[static_cast<std::size_t>(j)] = dump(rec);
        }
        for (const auto& r : results) write_line(out, r);
    }
    return kExitOk;
}

int cmd_judge(const std::string& tasks_path, const std::string& responses_path, bool tos, std::istream& std_in,
              std::ostream& out) {
    std::ifstream tasks(tasks_path, std::ios::binary);
    if (!tasks) throw IoError("cannot open " + tasks_path);
    // id -> byte offset of its task line; tasks are parsed on demand.
    std::unordered_map<std::string, std::streamoff> index;
    {
        std::string s;
        std::streamoff pos = tasks.tellg();
        while (std::getline(tasks, s)) {
            const Json rec = Json::parse(s, nullptr, false);
            if (rec.is_object() && rec.contains("id")) index.emplace(dump(rec["id"]), pos);
            pos = tasks.tellg();
        }
        if (tasks.bad()) throw IoError("read failed: " + tasks_path);
    }
    const ScoreMode mode = tos ? ScoreMode::ToS : ScoreMode::Strict;

    Input in(responses_path, std_in);
    std::vector<Line> chunk;
    std::size_t line_no = 0;
    while (read_chunk(in.get(), line_no, chunk)) {
        // Load each distinct task once per chunk, serially (one file handle).
        std::vector<Json> recs(chunk.size());
        std::vector<std::string> errors(chunk.size());
        std::unordered_map<std::string, std::shared_ptr<const TaskInstance>> loaded;
        std::unordered_map<std::string, std::string> load_errors;
        std::vector<std::shared_ptr<const TaskInstance>> task_for(chunk.size());
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            recs[i] = Json::parse(chunk[i].text, nullptr, false);
            if (!recs[i].is_object() || !recs[i].contains("id")) {
                errors[i] = "response record needs an \"id\"";
                continue;
            }
            const std::string key = dump(recs[i]["id"]);
            if (!loaded.count(key) && !load_errors.count(key)) {
                auto it = index.find(key);
                if (it == index.end()) {
                    load_errors[key] = "no task with id " + key;
                } else {
                    tasks.clear();
                    tasks.seekg(it->second);
                    std::string s;
                    std::getline(tasks, s);
                    if (!tasks) throw IoError("read failed: " + tasks_path);
                    try {
                        loaded[key] = std::make_shared<const TaskInstance>(TaskInstance::from_json(Json::parse(s)));
                    } catch (const std::exception& e) {
                        load_errors[key] = std::string("task ") + key + ": " + e.what();
                    }
                }
            }
            if (auto e = load_errors.find(key); e != load_errors.end()) {
                errors[i] = e->second;
            } else {
                task_for[i] = loaded[key];
            }
        }
        std::vector<std::string> results(chunk.size());
#pragma omp parallel for schedule(dynamic, 8)
        for (long long j = 0; j < static_cast<long long>(chunk.size()); ++j) {
            const auto i = static_cast<std::size_t>(j);
            Json result;
            try {
                if (!errors[i].empty()) throw std::invalid_argument(errors[i]);
                const auto v = judge(*task_for[i], text_field(recs[i]), mode);
                result = {{"id", recs[i]["id"]},
                          {"correct", v.correct},
                          {"category", category_json(v.category)},
                          {"ratio", v.score.ratio}};
            } catch (const std::exception& e) {
                result = echo_error(chunk[i], e.what());
            }
            results[i] = dump(result);
        }
        for (const auto& r : results) write_line(out, r);
    }
    return kExitOk;
}

int cmd_curate(const std::string& input, const std::string& resolver_dir, const std::string& out_path,
               std::optional<double> test_fraction, std::uint64_t seed, std::istream& std_in, std::ostream& out) {
    if (test_fraction && !(*test_fraction > 0 && *test_fraction < 1)) throw UsageError("--test-fraction must be in (0, 1)");
    std::error_code ec;
    if (!resolver_dir.empty() && !fs::is_directory(resolver_dir, ec)) throw IoError("not a directory: " + resolver_dir);
    Resolver resolver;
    if (!resolver_dir.empty()) resolver = DirectoryResolver(resolver_dir);

    std::ofstream sink(out_path, std::ios::binary | std::ios::trunc);
    if (!sink) throw IoError("cannot write " + out_path);

    std::size_t counts[3] = {0, 0, 0};
    StatsAccumulator stats;
    std::vector<std::string> kept_ids;

    auto process = [&](std::vector<RawDocument>& docs) {
        std::vector<CurationRecord> recs(docs.size());
        std::vector<std::optional<SchemaDoc>> compiled(docs.size());
#pragma omp parallel for schedule(dynamic, 4)
        for (long long j = 0; j < static_cast<long long>(docs.size()); ++j) {
            const auto i = static_cast<std::size_t>(j);
            recs[i]      = curate_one(docs[i], resolver);
            if (recs[i].final_schema) {
                auto c = compile(*recs[i].final_schema);
                if (c) compiled[i] = std::move(c).value();
            }
        }
        for (std::size_t i = 0; i < recs.size(); ++i) {
            ++counts[static_cast<int>(recs[i].outcome)];
            if (compiled[i]) {
                stats.add(*compiled[i]);
                kept_ids.push_back(recs[i].source_id);
            }
            write_line(sink, dump(recs[i].to_json()));
        }
    };

    std::vector<RawDocument> docs;
    if (fs::is_directory(input, ec)) {
        const auto files = list_files(input);
        for (std::size_t base = 0; base < files.size(); base += kChunk) {
            docs.clear();
            for (std::size_t i = base; i < std::min(files.size(), base + kChunk); ++i) {
                docs.push_back({fs::relative(files[i], input).generic_string(), read_file(files[i])});
            }
            process(docs);
        }
    } else {
        Input in(input, std_in);
        std::vector<Line> chunk;
        std::size_t line_no = 0;
        while (read_chunk(in.get(), line_no, chunk)) {
            docs.clear();
            for (auto& l : chunk) docs.push_back({"line:" + std::to_string(l.number), std::move(l.text)});
            process(docs);
        }
    }
    sink.close();
    if (!sink) throw IoError("write failed: " + out_path);

    Json summary;
    summary["total"]                = counts[0] + counts[1] + counts[2];
    summary["kept"]                 = counts[static_cast<int>(CurationOutcome::Kept)];
    summary["dropped_unresolvable"] = counts[static_cast<int>(CurationOutcome::DroppedUnresolvable)];
    summary["dropped_meta_invalid"] = counts[static_cast<int>(CurationOutcome::DroppedMetaInvalid)];
    summary["stats"]                = stats.empty() ? Json() : to_json(stats.result());
    if (test_fraction) {
        auto s            = split(kept_ids, *test_fraction, seed);
        summary["train"]  = s.train;
        summary["test"]   = s.test;
    }
    write_line(out, dump(summary));
    return kExitOk;
}

// A line may be a schema, a curation record or {"schema": ...}.
const Json& schema_of(const Json& rec) {
    if (rec.is_object()) {
        if (rec.contains("outcome") && rec.contains("final_schema")) {
            if (rec["final_schema"].is_null()) throw std::invalid_argument("record was not kept");
            return rec["final_schema"];
        }
        if (auto it = rec.find("schema"); it != rec.end()) return *it;
    }
    return rec;
}

int cmd_stats(const std::string& input, std::istream& std_in, std::ostream& out) {
    Input in(input, std_in);
    StatsAccumulator stats;
    std::vector<Line> chunk;
    std::size_t line_no = 0;
    while (read_chunk(in.get(), line_no, chunk)) {
        std::vector<std::optional<SchemaDoc>> docs(chunk.size());
        std::vector<std::string> errors(chunk.size());
#pragma omp parallel for schedule(dynamic, 8)
        for (long long j = 0; j < static_cast<long long>(chunk.size()); ++j) {
            const auto i = static_cast<std::size_t>(j);
            try {
                auto c = compile(schema_of(Json::parse(chunk[i].text)));
                if (c) {
                    docs[i] = std::move(c).value();
                } else {
                    errors[i] = c.error().reason;
                }
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            if (docs[i]) {
                stats.add(*docs[i]);
            } else {
                write_line(out, dump(echo_error(chunk[i], errors[i])));
            }
        }
    }
    if (stats.empty()) {
        write_line(out, dump(Json{{"error", "no valid schemas"}}));
    } else {
        write_line(out, dump(Json{{"stats", to_json(stats.result())}}));
    }
    return kExitOk;
}

int cmd_convert_tools(const std::string& input, std::istream& std_in, std::ostream& out) {
    Input in(input, std_in);
    map_records(in.get(), out, [](const Json& rec, const Line& line) {
        const Json* list = nullptr;
        Json single;
        Json id = line.number;
        if (rec.is_array()) {
            list = &rec;
        } else if (rec.is_object() && (rec.contains("tools") || rec.contains("functions"))) {
            list = rec.contains("tools") ? &rec["tools"] : &rec["functions"];
            if (rec.contains("id")) id = rec["id"];
            if (!list->is_array()) throw std::invalid_argument("tool list must be an array");
        } else {
            single = Json::array({rec});
            list   = &single;
        }
        std::vector<ToolDef> tools;
        for (const auto& t : *list) tools.push_back(ToolDef::from_json(t));
        auto converted = convert(tools);
        if (!converted) throw std::invalid_argument(converted.error().reason);
        return Json{{"id", id}, {"schema", std::move(converted).value()}};
    });
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fine-grained JSON schema validation, reward scoring and task generation"};
    app.require_subcommand(1);

    std::string schema, input, tasks, responses, kind, dir, resolver_dir, out_path;
    bool tos = false;
    std::size_t k = 0, n = 0, max_fields = 3;
    std::uint64_t seed = 0;
    std::optional<double> epsilon, test_fraction;

    auto* validate_cmd = app.add_subcommand("validate", "Validate {id, text} records against a schema");
    validate_cmd->add_option("--schema", schema, "Schema file or inline JSON")->required();
    validate_cmd->add_option("--input", input, "JSONL records, - for stdin")->required();

    auto* score_cmd = app.add_subcommand("score", "Fine-grained token score for {id, text} records");
    score_cmd->add_option("--schema", schema, "Schema file or inline JSON")->required();
    score_cmd->add_option("--input", input, "JSONL records, - for stdin")->required();
    score_cmd->add_flag("--tos", tos, "JSON5 input with comments ignored");

    auto* adv_cmd = app.add_subcommand("advantages", "Leave-one-out advantages over groups of K rewards");
    adv_cmd->add_option("--input", input, "JSONL {reward[, model_reward][, ratio]}")->required();
    adv_cmd->add_option("--k", k, "Group size")->required();
    adv_cmd->add_option("--epsilon", epsilon, "Clip range; adds clip_term from each record's ratio");

    auto* taskgen_cmd = app.add_subcommand("taskgen", "Generate benchmark tasks");
    taskgen_cmd->add_option("--kind", kind, "complex, custom or escape")->required();
    taskgen_cmd->add_option("--schemas", dir, "Directory of schema files")->required();
    taskgen_cmd->add_option("--seed", seed, "Seed")->required();
    taskgen_cmd->add_option("--n", n, "Number of tasks")->required();
    taskgen_cmd->add_option("--max-fields", max_fields, "Custom formats: most fields changed per schema");

    auto* judge_cmd = app.add_subcommand("judge", "Judge {id, text} responses against generated tasks");
    judge_cmd->add_option("--tasks", tasks, "Task JSONL")->required();
    judge_cmd->add_option("--responses", responses, "Response JSONL, - for stdin")->required();
    judge_cmd->add_flag("--tos", tos, "JSON5 responses with comments ignored");

    auto* curate_cmd = app.add_subcommand("curate", "Filter, merge and check a schema corpus");
    curate_cmd->add_option("--input", input, "Directory of schema files or JSONL of schemas")->required();
    curate_cmd->add_option("--resolver", resolver_dir, "Directory serving external references")->required();
    curate_cmd->add_option("--out", out_path, "Curation record JSONL")->required();
    curate_cmd->add_option("--test-fraction", test_fraction, "Also split kept ids");
    curate_cmd->add_option("--seed", seed, "Split seed");

    auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
    stats_cmd->add_option("--input", input, "JSONL of schemas or curation records")->required();

    auto* tools_cmd = app.add_subcommand("convert-tools", "Tool definitions to a tool-calling schema");
    tools_cmd->add_option("--input", input, "JSONL of tools or tool lists")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*validate_cmd) return cmd_validate(schema, input, in, out);
        if (*score_cmd) return cmd_score(schema, input, tos, in, out);
        if (*adv_cmd) return cmd_advantages(input, k, epsilon, in, out);
        if (*taskgen_cmd) return cmd_taskgen(kind, dir, seed, n, max_fields, out, err);
        if (*judge_cmd) return cmd_judge(tasks, responses, tos, in, out);
        if (*curate_cmd) return cmd_curate(input, resolver_dir, out_path, test_fraction, seed, in, out);
        if (*stats_cmd) return cmd_stats(input, in, out);
        if (*tools_cmd) return cmd_convert_tools(input, in, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}

}  // namespace jsonreward::cli
