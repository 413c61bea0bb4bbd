#include "jsonreward/taskgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <stdexcept>

#include "jsonreward/embedded.hpp"
#include "jsonreward/lex.hpp"
#include "jsonreward/rng.hpp"

namespace jsonreward {

namespace {

constexpr std::pair<TaskKind, std::string_view> kTaskNames[] = {
    {TaskKind::ComplexSchema, "complex"},
    {TaskKind::CustomFormats, "custom"},
    {TaskKind::EscapeTranslation, "escape"},
    {TaskKind::Reasoning, "reasoning"},
};

constexpr std::pair<ReasoningKind, std::string_view> kReasoningNames[] = {
    {ReasoningKind::GSM8K, "GSM8K"},
    {ReasoningKind::MATH500, "MATH500"},
    {ReasoningKind::MMLU, "MMLU"},
    {ReasoningKind::ARC, "ARC"},
};

constexpr std::string_view kSystemTemplate =
    "You should generate answer with given JSON format.\n<Schema> Here are the json-schema of the content "
    "format:\n{schema}\n</Schema>";
constexpr std::string_view kUserTemplate =
    "Please generate a valid JSON object according to the JSON schema. Give your JSON object directly, "
    "without ```.";
constexpr std::string_view kEscapeTemplate =
    "Please generate a valid JSON object according to the JSON schema, remember your special token here: "
    "{special_token} Give your JSON object directly, without ```.";
constexpr std::string_view kEscapeInstruction = "Put the special token from the instructions here, exactly as given.";

std::string fill(std::string_view templ, std::string_view slot, std::string_view value) {
    std::string out(templ);
    const auto at = out.find(slot);
    if (at != std::string::npos) out.replace(at, slot.size(), value);
    return out;
}

std::size_t code_points(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

const Json& reasoning_table() {
    static const Json t = Json::parse(embedded::reasoning_schemas());
    return t;
}

// Keys allowed on a field that custom rules and escape targets may use.
bool annotation_only(const Json& s) {
    static const std::set<std::string, std::less<>> allowed = {
        "type", "description", "title", "default", "examples", "$comment", "deprecated", "readOnly", "writeOnly"};
    for (const auto& [k, v] : s.items()) {
        if (!allowed.count(k)) return false;
    }
    return true;
}

bool string_typed(const Json& s) {
    auto it = s.find("type");
    if (it == s.end()) return false;
    if (it->is_string()) return *it == "string";
    if (it->is_array()) return std::find(it->begin(), it->end(), Json("string")) != it->end();
    return false;
}

bool allows_object(const Json& s) {
    auto it = s.find("type");
    if (it == s.end()) return true;
    if (it->is_string()) return *it == "object";
    if (it->is_array()) return std::find(it->begin(), it->end(), Json("object")) != it->end();
    return false;
}

// Parents with any of these could veto or redirect a property.
bool opaque_parent(const Json& s) {
    static constexpr std::string_view keys[] = {
        "$ref", "allOf", "anyOf", "oneOf", "not", "if", "then", "else", "patternProperties",
        "dependencies", "dependentSchemas", "dependentRequired", "propertyNames", "unevaluatedProperties",
        "enum", "const", "maxProperties"};
    for (auto k : keys) {
        if (s.contains(std::string(k))) return true;
    }
    return false;
}

void collect_refs(const Json& v, std::set<std::string>& out) {
    if (v.is_object()) {
        for (const auto& [k, x] : v.items()) {
            if (k == "$ref" && x.is_string()) {
                const auto& r = x.get_ref<const std::string&>();
                if (!r.empty() && r.front() == '#') out.insert(canonical_pointer(r));
            } else {
                collect_refs(x, out);
            }
        }
    } else if (v.is_array()) {
        for (const auto& x : v) collect_refs(x, out);
    }
}

void find_fields(const Json& s, const std::string& ptr, const std::string& inst, const std::set<std::string>& targets,
                 std::vector<FieldRef>& out) {
    if (!s.is_object() || opaque_parent(s) || !allows_object(s)) return;
    auto props = s.find("properties");
    if (props == s.end() || !props->is_object()) return;
    for (const auto& [key, sub] : props->items()) {
        const std::string p = ptr + "/properties/" + escape_pointer_token(key);
        const std::string i = inst + "/" + escape_pointer_token(key);
        if (!sub.is_object() || targets.count(p)) continue;
        if (string_typed(sub) && annotation_only(sub)) {
            out.push_back({p, i});
        } else {
            find_fields(sub, p, i, targets, out);
        }
    }
}

// Partial Fisher-Yates: `count` distinct indices below n, in draw order.
std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t count) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.below(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
}

std::string random_literal(Rng& rng) {
    static constexpr std::string_view alnum = "ABCDEFGHJKLMNPQRSTUVWXYZ23456789";
    std::string out = "ref-";
    for (int i = 0; i < 6; ++i) out += alnum[rng.below(alnum.size())];
    return out;
}

CustomRule draw_rule(Rng& rng) {
    const RuleKind kind = kAllRuleKinds[rng.below(std::size(kAllRuleKinds))];
    switch (kind) {
        case RuleKind::ConstLiteral: return CustomRule::const_literal(random_literal(rng));
        case RuleKind::RegexPattern: {
            const auto& t = regex_templates()[rng.below(regex_templates().size())];
            return CustomRule::regex_pattern(t.pattern, t.example);
        }
        default: return CustomRule::fixed(kind);
    }
}

Json hidden_json(const Hidden& hidden) {
    struct V {
        Json operator()(std::monostate) const { return Json::object(); }
        Json operator()(const CustomHidden& h) const {
            Json fields = Json::array();
            for (const auto& f : h.fields) {
                fields.push_back({{"field_path", f.field.field_path},
                                  {"instance_path", f.field.instance_path},
                                  {"rule", f.rule.to_json()}});
            }
            return {{"fields", fields}};
        }
        Json operator()(const EscapeHidden& h) const {
            return {{"special_string", h.special_string},
                    {"target_field_path", h.target.field_path},
                    {"instance_path", h.target.instance_path}};
        }
        Json operator()(const ReasoningHidden& h) const {
            return {{"dataset", std::string(to_string(h.dataset))}, {"gold", h.gold}};
        }
    };
    return std::visit(V{}, hidden);
}

}  // namespace

std::string_view to_string(TaskKind kind) {
    for (const auto& [k, n] : kTaskNames) {
        if (k == kind) return n;
    }
    return "complex";
}

std::optional<TaskKind> task_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kTaskNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

std::string_view to_string(ReasoningKind kind) {
    for (const auto& [k, n] : kReasoningNames) {
        if (k == kind) return n;
    }
    return "GSM8K";
}

std::optional<ReasoningKind> reasoning_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kReasoningNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

std::string prompt_schema_text(const Json& schema) {
    return schema.dump(2, ' ', false, Json::error_handler_t::replace);
}

std::string system_prompt(const Json& prompted_schema) {
    return fill(kSystemTemplate, "{schema}", prompt_schema_text(prompted_schema));
}

std::vector<FieldRef> plain_string_fields(const SchemaDoc& schema) {
    std::set<std::string> targets;
    collect_refs(schema.document(), targets);
    std::vector<FieldRef> out;
    find_fields(schema.document(), "#", "", targets, out);
    return out;
}

TaskInstance gen_complex(const SchemaDoc& schema) {
    TaskInstance t;
    t.kind   = TaskKind::ComplexSchema;
    t.schema = schema;
    t.prompt = {system_prompt(schema.document()), std::string(kUserTemplate)};
    return t;
}

TaskResult gen_custom_formats(const SchemaDoc& schema, std::uint64_t seed, const CustomFormatsConfig& config) {
    const auto fields = plain_string_fields(schema);
    if (fields.empty()) return TaskgenError{"schema has no plain string field"};
    if (config.max_fields == 0) return TaskgenError{"max_fields must be positive"};

    Rng rng(seed);
    const std::size_t count = rng.between(1, std::min(config.max_fields, fields.size()));
    CustomHidden hidden;
    for (std::size_t i : sample_indices(rng, fields.size(), count)) hidden.fields.push_back({fields[i], draw_rule(rng)});

    Json judged   = schema.document();
    Json prompted = schema.document();
    for (const auto& f : hidden.fields) {
        auto full = inject_rule(judged, f.field.field_path, f.rule, InjectMode::Full);
        auto desc = inject_rule(prompted, f.field.field_path, f.rule, InjectMode::DescriptionOnly);
        if (!full) return TaskgenError{full.error().reason};
        if (!desc) return TaskgenError{desc.error().reason};
        judged   = std::move(full).value();
        prompted = std::move(desc).value();
    }
    auto compiled = compile(judged);
    if (!compiled) return TaskgenError{compiled.error().reason};

    TaskInstance t;
    t.kind   = TaskKind::CustomFormats;
    t.schema = std::move(compiled).value();
    t.prompt = {system_prompt(prompted), std::string(kUserTemplate)};
    t.hidden = std::move(hidden);
    t.seed   = seed;
    return t;
}

std::string special_string(std::uint64_t seed) {
    static constexpr char32_t wide[] = {U'é', U'ü', U'ñ', U'ß', U'Ω', U'λ', U'中', U'文',
                                        U'→', U'€', U'✓', U'😀', U'🚀', U' '};
    // class weights: quote, backslash, newline, tab, CR, slash, non-ASCII, printable ASCII
    static constexpr unsigned weights[] = {3, 3, 2, 2, 1, 2, 3, 6};
    unsigned total = 0;
    for (unsigned w : weights) total += w;

    Rng rng(seed);
    const std::size_t len = rng.between(8, 64);
    std::string out;
    for (std::size_t i = 0; i < len; ++i) {
        unsigned pick = static_cast<unsigned>(rng.below(total));
        std::size_t cls = 0;
        while (pick >= weights[cls]) pick -= weights[cls++];
        switch (cls) {
            case 0: out += '"'; break;
            case 1: out += '\\'; break;
            case 2: out += '\n'; break;
            case 3: out += '\t'; break;
            case 4: out += '\r'; break;
            case 5: out += '/'; break;
            case 6: append_utf8(out, wide[rng.below(std::size(wide))]); break;
            default: out += static_cast<char>(0x20 + rng.below(0x7F - 0x20)); break;
        }
    }
    return out;
}

TaskResult gen_escape(const SchemaDoc& schema, std::uint64_t seed) {
    const auto fields = plain_string_fields(schema);
    if (fields.empty()) return TaskgenError{"schema has no plain string field"};

    Rng rng(seed);
    EscapeHidden hidden;
    hidden.target         = fields[rng.below(fields.size())];
    hidden.special_string = special_string(rng.next());

    Json doc = schema.document();
    Json& field = doc.at(Json::json_pointer(hidden.target.field_path.substr(1)));
    std::string description = field.value("description", std::string());
    if (!description.empty()) description += " ";
    field["description"] = description + std::string(kEscapeInstruction);
    auto compiled = compile(doc);
    if (!compiled) return TaskgenError{compiled.error().reason};

    TaskInstance t;
    t.kind   = TaskKind::EscapeTranslation;
    t.schema = std::move(compiled).value();
    t.prompt = {system_prompt(doc), fill(kEscapeTemplate, "{special_token}", hidden.special_string)};
    t.hidden = std::move(hidden);
    t.seed   = seed;
    return t;
}

const Json& reasoning_schema(ReasoningKind kind) { return reasoning_table().at(std::string(to_string(kind))); }

TaskInstance wrap_reasoning(ReasoningKind kind, std::string question, Json gold) {
    static const std::map<ReasoningKind, SchemaDoc> docs = [] {
        std::map<ReasoningKind, SchemaDoc> m;
        for (const auto& [k, n] : kReasoningNames) m.emplace(k, compile(reasoning_schema(k)).value());
        return m;
    }();
    TaskInstance t;
    t.kind   = TaskKind::Reasoning;
    t.schema = docs.at(kind);
    t.prompt = {system_prompt(reasoning_schema(kind)), std::move(question)};
    t.hidden = ReasoningHidden{kind, std::move(gold)};
    return t;
}

Json TaskInstance::to_json(std::string_view id) const {
    Json out;
    out["id"]            = std::string(id);
    out["kind"]          = std::string(to_string(kind));
    out["seed"]          = seed;
    out["schema"]        = schema.document();
    out["system_prompt"] = prompt.system;
    out["user_prompt"]   = prompt.user;
    out["hidden"]        = hidden_json(hidden);
    return out;
}

TaskInstance TaskInstance::from_json(const Json& record) {
    try {
        TaskInstance t;
        auto kind = task_kind_from_string(record.at("kind").get<std::string>());
        if (!kind) throw std::invalid_argument("unknown task kind " + record.at("kind").get<std::string>());
        t.kind = *kind;
        t.seed = record.value("seed", std::uint64_t{0});
        auto compiled = compile(record.at("schema"));
        if (!compiled) throw std::invalid_argument("task schema does not compile: " + compiled.error().reason);
        t.schema = std::move(compiled).value();
        t.prompt = {record.value("system_prompt", std::string()), record.value("user_prompt", std::string())};
        const Json& h = record.contains("hidden") ? record.at("hidden") : Json::object();
        switch (t.kind) {
            case TaskKind::ComplexSchema: break;
            case TaskKind::CustomFormats: {
                CustomHidden ch;
                for (const auto& f : h.at("fields")) {
                    ch.fields.push_back({{f.at("field_path").get<std::string>(), f.at("instance_path").get<std::string>()},
                                         CustomRule::from_json(f.at("rule"))});
                }
                t.hidden = std::move(ch);
                break;
            }
            case TaskKind::EscapeTranslation:
                t.hidden = EscapeHidden{h.at("special_string").get<std::string>(),
                                        {h.at("target_field_path").get<std::string>(), h.at("instance_path").get<std::string>()}};
                break;
            case TaskKind::Reasoning: {
                auto ds = reasoning_kind_from_string(h.at("dataset").get<std::string>());
                if (!ds) throw std::invalid_argument("unknown reasoning dataset");
                t.hidden = ReasoningHidden{*ds, h.value("gold", Json())};
                break;
            }
        }
        return t;
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("malformed task record: ") + e.what());
    }
}

namespace {

bool gold_matches(const JsonTree& tree, NodeId node, const Json& gold) {
    const JsonNode& n = tree.node(node);
    if (gold.is_number()) {
        return n.kind == ValueKind::Number && std::isfinite(n.number_value) &&
               std::fabs(n.number_value - gold.get<double>()) <= 1e-6;
    }
    if (gold.is_string()) return n.kind == ValueKind::String && n.string_value == gold.get_ref<const std::string&>();
    return equal(tree, node, gold);
}

}  // namespace

Verdict judge(const TaskInstance& task, std::string_view response_text, ScoreMode mode) {
    Verdict v;
    v.score = fine_grained_score(response_text, task.schema, mode);
    const auto parsed = parse(response_text, mode == ScoreMode::ToS ? Dialect::Json5 : Dialect::Json);
    if (!parsed) {
        v.category = classify(parsed.failure());
        return v;
    }
    const JsonTree& tree = parsed.tree();

    // Escape translation checks the target before the schema.
    if (const auto* esc = std::get_if<EscapeHidden>(&task.hidden)) {
        const auto node = tree.find(esc->target.instance_path);
        if (!node || tree.node(*node).kind != ValueKind::String ||
            tree.node(*node).string_value != esc->special_string) {
            v.category = FailureCategory::ValidationError;
            return v;
        }
    }

    const auto report = validate(tree, task.schema);
    if (!report.empty()) {
        v.category = classify(report);
        return v;
    }

    if (const auto* custom = std::get_if<CustomHidden>(&task.hidden)) {
        for (const auto& f : custom->fields) {
            const auto node = tree.find(f.field.instance_path);
            if (!node) continue;
            const JsonNode& n = tree.node(*node);
            if (n.kind == ValueKind::String && !f.rule.check(n.string_value)) {
                v.category = FailureCategory::PatternError;
                return v;
            }
        }
    } else if (const auto* r = std::get_if<ReasoningHidden>(&task.hidden); r && !r->gold.is_null()) {
        const auto node = tree.find("/answer");
        if (!node || !gold_matches(tree, *node, r->gold)) {
            v.category = FailureCategory::Other;
            return v;
        }
    }
    v.correct = true;
    return v;
}

// Satisfying-instance search. Works on conjunctions of subschemas: `$ref`
// and `allOf` are flattened, disjunctions are tried one alternative at a
// time, and every candidate is checked with the validator.
namespace {

enum Kind : unsigned {
    kNull = 1, kBool = 2, kObject = 4, kArray = 8, kString = 16, kInteger = 32, kFraction = 64, kAny = 127
};

unsigned kinds_of(unsigned types) {
    unsigned k = 0;
    if (types & kTypeNull) k |= kNull;
    if (types & kTypeBoolean) k |= kBool;
    if (types & kTypeObject) k |= kObject;
    if (types & kTypeArray) k |= kArray;
    if (types & kTypeString) k |= kString;
    if (types & kTypeInteger) k |= kInteger;
    if (types & kTypeNumber) k |= kInteger | kFraction;
    return k;
}

std::vector<std::string> witness_strings() {
    std::vector<std::string> w = {"", "a", "example", "A1", "0"};
    for (RuleKind k : kAllRuleKinds) {
        if (k != RuleKind::ConstLiteral && k != RuleKind::RegexPattern) w.push_back(CustomRule::fixed(k).example());
    }
    for (const auto& t : regex_templates()) w.push_back(t.example);
    for (const char* s : {"2024-01-01T00:00:00Z", "2024-01-01", "12:00:00", "user@example.com", "https://example.com",
                          "example.com", "127.0.0.1", "::1", "123e4567-e89b-12d3-a456-426614174000"}) {
        w.emplace_back(s);
    }
    return w;
}

// Shortest-ish string for a regex in a common subset: literals, escapes,
// classes, groups, alternation and quantifiers. Unbounded repeats run
// `stretch` extra times. Anything else (lookaround, backreferences) gives up.
class RegexSample {
   public:
    RegexSample(std::string_view re, std::size_t stretch) : re_(re), stretch_(stretch) {}

    std::optional<std::string> run() {
        std::string out;
        if (!alt(out) || pos_ != re_.size()) return std::nullopt;
        return out;
    }

   private:
    bool alt(std::string& out) {
        std::string first;
        if (!seq(first)) return false;
        while (pos_ < re_.size() && re_[pos_] == '|') {
            ++pos_;
            std::string skip;
            if (!seq(skip)) return false;
        }
        out += first;
        return true;
    }

    bool seq(std::string& out) {
        while (pos_ < re_.size() && re_[pos_] != '|' && re_[pos_] != ')') {
            std::string piece;
            if (!atom(piece)) return false;
            std::size_t lo = 1, hi = 1;
            if (!quantifier(lo, hi)) return false;
            std::size_t n = lo;
            if (hi > lo) n = std::min(hi, lo + stretch_);
            for (std::size_t i = 0; i < n; ++i) out += piece;
        }
        return true;
    }

    bool quantifier(std::size_t& lo, std::size_t& hi) {
        if (pos_ >= re_.size()) return true;
        const char c = re_[pos_];
        constexpr std::size_t inf = 1u << 20;
        if (c == '*') lo = 0, hi = inf, ++pos_;
        else if (c == '+') lo = 1, hi = inf, ++pos_;
        else if (c == '?') lo = 0, hi = 1, ++pos_;
        else if (c == '{') {
            const auto close = re_.find('}', pos_);
            if (close == std::string_view::npos) return false;
            const std::string body(re_.substr(pos_ + 1, close - pos_ - 1));
            const auto comma = body.find(',');
            try {
                lo = std::stoul(body.substr(0, comma));
                hi = comma == std::string::npos ? lo : (comma + 1 == body.size() ? inf : std::stoul(body.substr(comma + 1)));
            } catch (const std::exception&) {
                return false;
            }
            if (lo > 4096) return false;
            pos_ = close + 1;
        } else {
            return true;
        }
        if (pos_ < re_.size() && re_[pos_] == '?') ++pos_;
        return true;
    }

    static char class_escape(char e) {
        switch (e) {
            case 'd': return '0';
            case 'w': return 'a';
            case 's': return ' ';
            case 'D': case 'S': case 'W': return '-';
            case 'n': return '\n';
            case 't': return '\t';
            case 'r': return '\r';
            default: return e;
        }
    }

    bool atom(std::string& out) {
        const char c = re_[pos_++];
        switch (c) {
            case '^':
            case '$': return true;
            case '.': out += 'a'; return true;
            case '\\':
                if (pos_ >= re_.size()) return false;
                if (std::isdigit(static_cast<unsigned char>(re_[pos_])) || re_[pos_] == 'b' || re_[pos_] == 'B') return false;
                out += class_escape(re_[pos_++]);
                return true;
            case '(': {
                if (pos_ < re_.size() && re_[pos_] == '?') {
                    if (pos_ + 1 < re_.size() && re_[pos_ + 1] == ':') pos_ += 2;
                    else return false;
                }
                if (!alt(out) || pos_ >= re_.size() || re_[pos_] != ')') return false;
                ++pos_;
                return true;
            }
            case '[': return char_class(out);
            case '*': case '+': case '?': case '{': case ')': return false;
            default: out += c; return true;
        }
    }

    bool char_class(std::string& out) {
        bool negated = false;
        if (pos_ < re_.size() && re_[pos_] == '^') negated = true, ++pos_;
        std::vector<std::pair<unsigned char, unsigned char>> ranges;
        bool first = true;
        while (pos_ < re_.size() && (re_[pos_] != ']' || first)) {
            first = false;
            char lo = re_[pos_++];
            if (lo == '\\') {
                if (pos_ >= re_.size()) return false;
                const char e = re_[pos_++];
                if (e == 'd') { ranges.push_back({'0', '9'}); continue; }
                if (e == 'w') { ranges.push_back({'a', 'z'}); ranges.push_back({'A', 'Z'}); ranges.push_back({'0', '9'}); ranges.push_back({'_', '_'}); continue; }
                if (e == 's') { ranges.push_back({' ', ' '}); ranges.push_back({'\t', '\r'}); continue; }
                lo = class_escape(e);
            }
            char hi = lo;
            if (pos_ + 1 < re_.size() && re_[pos_] == '-' && re_[pos_ + 1] != ']') {
                hi = re_[pos_ + 1];
                pos_ += 2;
                if (hi == '\\') {
                    if (pos_ >= re_.size()) return false;
                    hi = class_escape(re_[pos_++]);
                }
            }
            ranges.push_back({static_cast<unsigned char>(lo), static_cast<unsigned char>(hi)});
        }
        if (pos_ >= re_.size()) return false;
        ++pos_;
        auto in = [&](unsigned char ch) {
            for (auto [a, b] : ranges) {
                if (ch >= a && ch <= b) return true;
            }
            return false;
        };
        // Prefer letters and digits, then other printable ASCII.
        static constexpr std::string_view order =
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-. !#$%&()*+,/:;<=>?@[]^{|}~'\"\\`";
        for (char ch : order) {
            if (in(static_cast<unsigned char>(ch)) != negated) {
                out += ch;
                return true;
            }
        }
        return false;
    }

    std::string_view re_;
    std::size_t stretch_;
    std::size_t pos_ = 0;
};

class Builder {
   public:
    Builder(const SchemaDoc& doc, const std::map<std::string, Json>& overrides) : doc_(doc), overrides_(overrides) {}

    std::optional<Json> value(std::vector<SchemaId> ids, const std::string& path, std::set<SchemaId> branched,
                              int depth) {
        if (auto it = overrides_.find(path); it != overrides_.end()) return it->second;
        if (depth > 24 || ++budget_ > 200000) return std::nullopt;
        const auto conj = closure(ids);
        for (SchemaId id : conj) {
            const auto& n = doc_.node(id);
            if (n.boolean_schema && !*n.boolean_schema) return std::nullopt;
        }
        auto ok = [&](const Json& c) { return check(c, conj); };

        for (SchemaId id : conj) {
            const auto& n = doc_.node(id);
            if (n.const_value && ok(*n.const_value)) return n.const_value;
            if (n.enum_values) {
                for (const auto& e : *n.enum_values) {
                    if (ok(e)) return e;
                }
            }
        }
        for (SchemaId id : conj) {
            if (doc_.node(id).const_value || doc_.node(id).enum_values) return branch(ids, conj, path, branched, depth);
        }

        unsigned allowed = kAny;
        for (SchemaId id : conj) {
            if (doc_.node(id).types) allowed &= kinds_of(*doc_.node(id).types);
        }
        for (unsigned k : order(allowed, path)) {
            if (auto c = build(k, conj, path, branched, depth); c && ok(*c)) return c;
        }
        return branch(ids, conj, path, branched, depth);
    }

   private:
    std::vector<SchemaId> closure(const std::vector<SchemaId>& ids) const {
        std::vector<SchemaId> out;
        std::set<SchemaId> seen;
        std::vector<SchemaId> work(ids.rbegin(), ids.rend());
        while (!work.empty()) {
            const SchemaId id = work.back();
            work.pop_back();
            if (!seen.insert(id).second) continue;
            out.push_back(id);
            const auto& n = doc_.node(id);
            if (n.ref) work.push_back(*n.ref);
            for (auto it = n.all_of.rbegin(); it != n.all_of.rend(); ++it) work.push_back(*it);
        }
        return out;
    }

    // Tries each alternative of the first unexplored anyOf/oneOf/if.
    std::optional<Json> branch(const std::vector<SchemaId>& ids, const std::vector<SchemaId>& conj,
                               const std::string& path, std::set<SchemaId> branched, int depth) {
        for (SchemaId id : conj) {
            if (branched.count(id)) continue;
            const auto& n = doc_.node(id);
            std::vector<std::vector<SchemaId>> alts;
            for (SchemaId a : n.any_of) alts.push_back({a});
            for (SchemaId a : n.one_of) alts.push_back({a});
            if (n.if_schema) {
                std::vector<SchemaId> yes = {*n.if_schema};
                if (n.then_schema) yes.push_back(*n.then_schema);
                alts.push_back(yes);
                alts.push_back(n.else_schema ? std::vector<SchemaId>{*n.else_schema} : std::vector<SchemaId>{});
            }
            if (alts.empty()) continue;
            branched.insert(id);
            for (const auto& alt : alts) {
                auto next = ids;
                next.insert(next.end(), alt.begin(), alt.end());
                if (auto c = value(next, path, branched, depth + 1); c && check(*c, conj)) return c;
            }
            return std::nullopt;
        }
        return std::nullopt;
    }

    bool override_below(const std::string& path) const {
        const std::string prefix = path + "/";
        auto it = overrides_.lower_bound(prefix);
        return it != overrides_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
    }

    std::vector<unsigned> order(unsigned allowed, const std::string& path) const {
        std::vector<unsigned> out;
        const bool below = override_below(path);
        static constexpr unsigned pref[] = {kNull, kString, kInteger, kFraction, kBool, kObject, kArray};
        if (below && (allowed & kObject)) out.push_back(kObject);
        for (unsigned k : pref) {
            if ((allowed & k) && !(below && k == kObject)) out.push_back(k);
        }
        // Typed schemas rarely want null first; keep it last unless it is the only type.
        if (allowed != kAny && out.size() > 1 && out.front() == kNull) {
            out.erase(out.begin());
            out.push_back(kNull);
        }
        return out;
    }

    std::optional<Json> build(unsigned kind, const std::vector<SchemaId>& conj, const std::string& path,
                              const std::set<SchemaId>& branched, int depth) {
        (void)branched;
        switch (kind) {
            case kNull: return Json(nullptr);
            case kBool: return Json(false);
            case kString: return build_string(conj);
            case kInteger: return build_number(conj, true);
            case kFraction: return build_number(conj, false);
            case kObject: return build_object(conj, path, depth);
            case kArray: return build_array(conj, path, depth);
        }
        return std::nullopt;
    }

    std::optional<Json> build_string(const std::vector<SchemaId>& conj) {
        std::uint64_t lo = 0, hi = UINT64_MAX;
        std::vector<const Pattern*> patterns;
        for (SchemaId id : conj) {
            const auto& n = doc_.node(id);
            if (n.min_length) lo = std::max(lo, *n.min_length);
            if (n.max_length) hi = std::min(hi, *n.max_length);
            if (n.pattern) patterns.push_back(&*n.pattern);
        }
        static const std::vector<std::string> witnesses = witness_strings();
        auto fits = [&](const std::string& s) {
            const auto len = code_points(s);
            if (len < lo || len > hi) return false;
            for (const Pattern* p : patterns) {
                if (!p->search(s)) return false;
            }
            return true;
        };
        for (const auto& w : witnesses) {
            if (fits(w)) return Json(w);
        }
        for (const Pattern* p : patterns) {
            for (std::size_t stretch : {0, 1, 2, 4, 8, 16, 64}) {
                auto w = RegexSample(p->source(), stretch).run();
                if (w && fits(*w)) return Json(*w);
            }
        }
        if (lo <= 4096) {
            std::string s(lo, 'a');
            if (fits(s)) return Json(s);
        }
        return std::nullopt;
    }

    std::optional<Json> build_number(const std::vector<SchemaId>& conj, bool integer) {
        double lo = -INFINITY, hi = INFINITY;
        bool lo_strict = false, hi_strict = false;
        std::optional<double> step;
        for (SchemaId id : conj) {
            const auto& n = doc_.node(id);
            if (n.minimum && *n.minimum > lo) lo = *n.minimum, lo_strict = false;
            if (n.exclusive_minimum && *n.exclusive_minimum >= lo) lo = *n.exclusive_minimum, lo_strict = true;
            if (n.maximum && *n.maximum < hi) hi = *n.maximum, hi_strict = false;
            if (n.exclusive_maximum && *n.exclusive_maximum <= hi) hi = *n.exclusive_maximum, hi_strict = true;
            if (n.multiple_of && !step) step = *n.multiple_of;
        }
        auto inside = [&](double v) {
            return (lo_strict ? v > lo : v >= lo) && (hi_strict ? v < hi : v <= hi);
        };
        std::vector<double> cands;
        const double base = std::isfinite(lo) ? lo : (std::isfinite(hi) && hi < 0 ? hi : 0.0);
        if (step && *step > 0) {
            double k = std::ceil(base / *step);
            for (int i = 0; i < 64; ++i, k += 1) cands.push_back(k * *step);
            k = std::floor((std::isfinite(hi) ? hi : 0.0) / *step);
            for (int i = 0; i < 8; ++i, k -= 1) cands.push_back(k * *step);
        } else if (integer) {
            cands = {0.0, std::ceil(base), std::ceil(base) + 1, std::floor(hi), std::floor(hi) - 1};
        } else {
            cands = {0.5, base + 0.5, (lo + hi) / 2, hi - 0.5};
        }
        for (double v : cands) {
            if (!std::isfinite(v) || !inside(v)) continue;
            const bool is_int = v == std::floor(v) && std::fabs(v) < 9e15;
            if (integer) {
                if (is_int) return Json(static_cast<std::int64_t>(v));
            } else if (!is_int) {
                return Json(v);
            }
        }
        return std::nullopt;
    }

    std::vector<SchemaId> property_schemas(const std::vector<SchemaId>& conj, const std::string& key) const {
        std::vector<SchemaId> out;
        for (SchemaId id : conj) {
            const auto& n = doc_.node(id);
            bool matched = false;
            for (const auto& [k, s] : n.properties) {
                if (k == key) out.push_back(s), matched = true;
            }
            for (const auto& [p, s] : n.pattern_properties) {
                if (p.search(key)) out.push_back(s), matched = true;
            }
            if (!matched && n.additional_properties) out.push_back(*n.additional_properties);
        }
        return out;
    }

    std::optional<Json> build_object(const std::vector<SchemaId>& conj, const std::string& path, int depth) {
        std::vector<std::string> keys;
        auto add = [&](const std::string& k) {
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
        };
        std::uint64_t min_props = 0;
        for (SchemaId id : conj) {
            const auto& n = doc_.node(id);
            for (const auto& r : n.required) add(r);
            if (n.min_properties) min_props = std::max(min_props, *n.min_properties);
        }
        const std::string prefix = path + "/";
        for (auto it = overrides_.lower_bound(prefix); it != overrides_.end() && it->first.compare(0, prefix.size(), prefix) == 0; ++it) {
            const auto rest = std::string_view(it->first).substr(prefix.size());
            add(unescape_pointer_token(rest.substr(0, rest.find('/'))));
        }
        for (SchemaId id : conj) {
            for (const auto& [k, s] : doc_.node(id).properties) {
                if (keys.size() >= min_props) break;
                add(k);
            }
        }
        for (std::size_t i = 1; keys.size() < min_props && i < 64; ++i) add("p" + std::to_string(i));

        Json out = Json::object();
        for (const auto& k : keys) {
            auto v = value(property_schemas(conj, k), prefix + escape_pointer_token(k), {}, depth + 1);
            if (!v) return std::nullopt;
            out[k] = std::move(*v);
        }
        return out;
    }

    std::optional<Json> build_array(const std::vector<SchemaId>& conj, const std::string& path, int depth) {
        std::uint64_t min_items = 0;
        for (SchemaId id : conj) {
            if (doc_.node(id).min_items) min_items = std::max(min_items, *doc_.node(id).min_items);
        }
        if (min_items > 256) return std::nullopt;
        Json out = Json::array();
        for (std::size_t i = 0; i < min_items; ++i) {
            std::vector<SchemaId> subs;
            for (SchemaId id : conj) {
                const auto& n = doc_.node(id);
                if (i < n.prefix_items.size()) {
                    subs.push_back(n.prefix_items[i]);
                } else if (!n.prefix_items.empty() && n.additional_items) {
                    subs.push_back(*n.additional_items);
                } else if (n.items) {
                    subs.push_back(*n.items);
                }
            }
            auto v = value(subs, path + "/" + std::to_string(i), {}, depth + 1);
            if (!v) return std::nullopt;
            out.push_back(std::move(*v));
        }
        return out;
    }

    bool check(const Json& candidate, const std::vector<SchemaId>& conj) const {
        const auto parsed = parse(to_text(candidate), Dialect::Json);
        if (!parsed) return false;
        for (SchemaId id : conj) {
            if (!validate_node(parsed.tree(), parsed.tree().root(), doc_, id).empty()) return false;
        }
        return true;
    }

    const SchemaDoc& doc_;
    const std::map<std::string, Json>& overrides_;
    std::size_t budget_ = 0;
};

}  // namespace

std::optional<Json> satisfying_instance(const SchemaDoc& schema, const std::map<std::string, Json>& overrides) {
    Builder b(schema, overrides);
    auto v = b.value({schema.root()}, "", {}, 0);
    if (!v) return std::nullopt;
    const auto parsed = parse(to_text(*v), Dialect::Json);
    if (!parsed || !validate(parsed.tree(), schema).empty()) return std::nullopt;
    return v;
}

std::optional<std::string> self_test_response(const TaskInstance& task) {
    std::map<std::string, Json> overrides;
    if (const auto* c = std::get_if<CustomHidden>(&task.hidden)) {
        for (const auto& f : c->fields) overrides[f.field.instance_path] = f.rule.example();
    } else if (const auto* e = std::get_if<EscapeHidden>(&task.hidden)) {
        overrides[e->target.instance_path] = e->special_string;
    } else if (const auto* r = std::get_if<ReasoningHidden>(&task.hidden); r && !r->gold.is_null()) {
        overrides["/answer"] = r->gold;
    }
    auto v = satisfying_instance(task.schema, overrides);
    if (!v) return std::nullopt;
    return to_text(*v);
}

}  // namespace jsonreward
