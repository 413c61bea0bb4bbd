#include "jsonreward/schema.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/regex.hpp>

namespace jsonreward {

// ---------------------------------------------------------------------------
// Types and patterns

namespace {

constexpr std::pair<std::string_view, unsigned> kTypeNames[] = {
    {"null", kTypeNull},     {"boolean", kTypeBoolean}, {"object", kTypeObject}, {"array", kTypeArray},
    {"number", kTypeNumber}, {"string", kTypeString},   {"integer", kTypeInteger},
};

}  // namespace

std::optional<unsigned> type_bit(std::string_view name) {
    for (const auto& [n, bit] : kTypeNames) {
        if (n == name) return bit;
    }
    return std::nullopt;
}

std::string type_names(unsigned mask) {
    std::string out;
    for (const auto& [n, bit] : kTypeNames) {
        if (!(mask & bit)) continue;
        if (!out.empty()) out += ", ";
        out += n;
    }
    return out;
}

struct CompiledRegex {
    boost::regex re;
};

Pattern::Pattern(std::string source) : source_(std::move(source)) {
    try {
        auto compiled = std::make_shared<CompiledRegex>();
        compiled->re.assign(source_, boost::regex::ECMAScript | boost::regex::no_mod_m | boost::regex::no_mod_s);
        regex_ = std::move(compiled);
    } catch (const boost::regex_error& e) {
        throw std::invalid_argument(e.what());
    }
}

bool Pattern::search(std::string_view text) const {
    if (!regex_) return true;
    try {
        return boost::regex_search(text.begin(), text.end(), regex_->re, boost::match_not_dot_newline);
    } catch (const std::runtime_error&) {
        return false;
    }
}

// ---------------------------------------------------------------------------
// Pointers

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string percent_decode(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
            out.push_back(static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2])));
            i += 2;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

std::string_view strip_hash(std::string_view pointer) {
    if (!pointer.empty() && pointer.front() == '#') pointer.remove_prefix(1);
    return pointer;
}

bool parse_index(const std::string& token, std::size_t& out) {
    if (token.empty() || (token.size() > 1 && token[0] == '0')) return false;
    out = 0;
    for (char c : token) {
        if (c < '0' || c > '9') return false;
        out = out * 10 + static_cast<std::size_t>(c - '0');
        if (out > (1u << 30)) return false;
    }
    return true;
}

}  // namespace

const Json* resolve_pointer(const Json& document, std::string_view pointer) {
    const std::string decoded = percent_decode(strip_hash(pointer));
    if (!decoded.empty() && decoded.front() != '/') return nullptr;
    const Json* at = &document;
    for (const auto& token : split_pointer(decoded)) {
        if (at->is_object()) {
            auto it = at->find(token);
            if (it == at->end()) return nullptr;
            at = &*it;
        } else if (at->is_array()) {
            std::size_t index = 0;
            if (!parse_index(token, index) || index >= at->size()) return nullptr;
            at = &(*at)[index];
        } else {
            return nullptr;
        }
    }
    return at;
}

std::string canonical_pointer(std::string_view pointer) {
    std::string out = "#";
    for (const auto& token : split_pointer(percent_decode(strip_hash(pointer)))) {
        out += "/";
        out += escape_pointer_token(token);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Subschema walking

namespace {

constexpr std::string_view kSchemaMaps[] = {"properties", "patternProperties", "$defs", "definitions",
                                            "dependentSchemas"};
constexpr std::string_view kSchemaSingles[] = {"additionalProperties", "additionalItems", "contains",
                                               "propertyNames",        "not",             "if",
                                               "then",                 "else",            "unevaluatedItems",
                                               "unevaluatedProperties"};
constexpr std::string_view kSchemaArrays[] = {"prefixItems", "allOf", "anyOf", "oneOf"};

constexpr std::string_view kDepthKeywords[] = {"properties", "patternProperties", "items", "prefixItems",
                                               "$defs",      "definitions",       "oneOf", "anyOf",
                                               "allOf",      "not",               "if",    "then",
                                               "else"};

bool is_schema_value(const Json& v) { return v.is_object() || v.is_boolean(); }

}  // namespace

void for_each_subschema(const Json& schema,
                        const std::function<void(std::string_view, const std::string&, const Json&)>& fn) {
    if (!schema.is_object()) return;
    for (auto it = schema.begin(); it != schema.end(); ++it) {
        const std::string& key = it.key();
        const Json& value      = it.value();
        const std::string base = "/" + escape_pointer_token(key);
        if (std::find(std::begin(kSchemaMaps), std::end(kSchemaMaps), key) != std::end(kSchemaMaps)) {
            if (!value.is_object()) continue;
            for (auto m = value.begin(); m != value.end(); ++m) {
                if (is_schema_value(m.value())) fn(key, base + "/" + escape_pointer_token(m.key()), m.value());
            }
        } else if (std::find(std::begin(kSchemaSingles), std::end(kSchemaSingles), key) != std::end(kSchemaSingles)) {
            if (is_schema_value(value)) fn(key, base, value);
        } else if (std::find(std::begin(kSchemaArrays), std::end(kSchemaArrays), key) != std::end(kSchemaArrays) ||
                   key == "items") {
            if (value.is_array()) {
                for (std::size_t i = 0; i < value.size(); ++i) {
                    if (is_schema_value(value[i])) fn(key, base + "/" + std::to_string(i), value[i]);
                }
            } else if (key == "items" && is_schema_value(value)) {
                fn(key, base, value);
            }
        } else if (key == "dependencies" && value.is_object()) {
            for (auto m = value.begin(); m != value.end(); ++m) {
                if (is_schema_value(m.value())) fn(key, base + "/" + escape_pointer_token(m.key()), m.value());
            }
        }
    }
}

std::size_t depth(const Json& schema) {
    // Explicit stack; crawled schemas can nest deeply.
    std::size_t best = 0;
    std::vector<std::pair<const Json*, std::size_t>> stack{{&schema, 1}};
    while (!stack.empty()) {
        auto [node, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        for_each_subschema(*node, [&](std::string_view keyword, const std::string&, const Json& sub) {
            if (std::find(std::begin(kDepthKeywords), std::end(kDepthKeywords), keyword) != std::end(kDepthKeywords)) {
                stack.emplace_back(&sub, d + 1);
            }
        });
    }
    return best;
}

std::size_t description_length(const Json& schema) {
    std::size_t total = 0;
    std::vector<const Json*> stack{&schema};
    while (!stack.empty()) {
        const Json* node = stack.back();
        stack.pop_back();
        if (!node->is_object()) continue;
        auto it = node->find("description");
        if (it != node->end() && it->is_string()) total += utf8::length(it->get_ref<const std::string&>());
        for_each_subschema(*node, [&](std::string_view, const std::string&, const Json& sub) { stack.push_back(&sub); });
    }
    return total;
}

// ---------------------------------------------------------------------------
// URIs

namespace {

std::pair<std::string, std::string> split_fragment(std::string_view ref) {
    const auto hash = ref.find('#');
    if (hash == std::string_view::npos) return {std::string(ref), ""};
    return {std::string(ref.substr(0, hash)), std::string(ref.substr(hash + 1))};
}

bool has_scheme(std::string_view uri) {
    const auto colon = uri.find(':');
    if (colon == std::string_view::npos || colon == 0) return false;
    for (std::size_t i = 0; i < colon; ++i) {
        const char c = uri[i];
        const bool ok = std::isalpha(static_cast<unsigned char>(c)) ||
                        (i > 0 && (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.'));
        if (!ok) return false;
    }
    return true;
}

std::string normalize_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    const bool absolute = !path.empty() && path.front() == '/';
    while (start <= path.size()) {
        auto slash = path.find('/', start);
        if (slash == std::string_view::npos) slash = path.size();
        std::string seg(path.substr(start, slash - start));
        if (seg == "..") {
            if (!parts.empty() && parts.back() != "..") {
                parts.pop_back();
            } else if (!absolute) {
                parts.push_back(seg);
            }
        } else if (!seg.empty() && seg != ".") {
            parts.push_back(std::move(seg));
        }
        start = slash + 1;
    }
    std::string out = absolute ? "/" : "";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += "/";
        out += parts[i];
    }
    return out;
}

/// Resolves `ref` (no fragment) against `base` (no fragment).
std::string resolve_uri(const std::string& base, const std::string& ref) {
    if (ref.empty()) return base;
    if (has_scheme(ref) || base.empty()) return ref;
    std::string prefix;
    std::string base_path = base;
    if (has_scheme(base)) {
        const auto scheme_end = base.find("://");
        if (scheme_end != std::string::npos) {
            const auto path_start = base.find('/', scheme_end + 3);
            prefix    = base.substr(0, path_start == std::string::npos ? base.size() : path_start);
            base_path = path_start == std::string::npos ? "/" : base.substr(path_start);
        } else {
            const auto colon = base.find(':');
            prefix           = base.substr(0, colon + 1);
            base_path        = base.substr(colon + 1);
        }
    }
    std::string joined;
    if (ref.front() == '/') {
        joined = ref;
    } else {
        const auto slash = base_path.rfind('/');
        joined           = (slash == std::string::npos ? std::string() : base_path.substr(0, slash + 1)) + ref;
    }
    return prefix + normalize_path(joined);
}

std::string root_base(const Json& schema) {
    if (schema.is_object()) {
        auto it = schema.find("$id");
        if (it != schema.end() && it->is_string()) return split_fragment(it->get_ref<const std::string&>()).first;
    }
    return "";
}

/// True when `ref` targets the document whose base URI is `base`.
bool is_internal(const std::string& ref, const std::string& base) {
    if (ref.empty() || ref.front() == '#') return true;
    auto [uri, fragment] = split_fragment(ref);
    return !base.empty() && resolve_uri(base, uri) == base;
}

struct RefSite {
    std::string pointer;  // of the object holding "$ref", relative to the document root
    std::string ref;
};

void collect_refs(const Json& schema, const std::string& pointer, std::vector<RefSite>& out) {
    std::vector<std::pair<const Json*, std::string>> stack{{&schema, pointer}};
    std::vector<RefSite> found;
    while (!stack.empty()) {
        auto [node, ptr] = stack.back();
        stack.pop_back();
        if (!node->is_object()) continue;
        auto it = node->find("$ref");
        if (it != node->end() && it->is_string()) found.push_back({ptr, it->get<std::string>()});
        std::vector<std::pair<const Json*, std::string>> children;
        for_each_subschema(*node, [&](std::string_view, const std::string& rel, const Json& sub) {
            children.emplace_back(&sub, ptr + rel);
        });
        stack.insert(stack.end(), children.rbegin(), children.rend());
    }
    out.insert(out.end(), found.begin(), found.end());
}

std::string sanitize(std::string_view s) {
    std::string out;
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        out.push_back(std::isalnum(u) || c == '_' || c == '-' ? c : '_');
    }
    return out;
}

std::string def_name(const std::string& uri, const std::string& fragment) {
    std::string stem = uri;
    if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    std::string name = sanitize(stem.empty() ? "ext" : stem);
    if (!fragment.empty() && fragment.front() == '/') {
        for (const auto& seg : split_pointer(percent_decode(fragment))) name += "_" + sanitize(seg);
    } else if (!fragment.empty()) {
        name += "_" + sanitize(fragment);
    }
    return name;
}

/// Finds a plain-name fragment (`$anchor`, or a `$id` of the form "#name").
const Json* find_anchor(const Json& document, std::string_view name, std::string* pointer_out) {
    std::vector<std::pair<const Json*, std::string>> stack{{&document, ""}};
    while (!stack.empty()) {
        auto [node, ptr] = stack.back();
        stack.pop_back();
        if (!node->is_object()) continue;
        auto a = node->find("$anchor");
        if (a != node->end() && a->is_string() && a->get_ref<const std::string&>() == name) {
            if (pointer_out) *pointer_out = ptr;
            return node;
        }
        auto id = node->find("$id");
        if (id != node->end() && id->is_string()) {
            const auto& s = id->get_ref<const std::string&>();
            if (s.size() == name.size() + 1 && s.front() == '#' && s.substr(1) == name) {
                if (pointer_out) *pointer_out = ptr;
                return node;
            }
        }
        for_each_subschema(*node, [&](std::string_view, const std::string& rel, const Json& sub) {
            stack.emplace_back(&sub, ptr + rel);
        });
    }
    return nullptr;
}

/// Target of a fragment within a document, with its canonical pointer.
const Json* resolve_fragment(const Json& document, const std::string& fragment, std::string* pointer_out) {
    const std::string decoded = percent_decode(fragment);
    if (decoded.empty() || decoded.front() == '/') {
        const Json* target = resolve_pointer(document, decoded);
        if (target && pointer_out) *pointer_out = canonical_pointer(decoded).substr(1);
        return target;
    }
    return find_anchor(document, decoded, pointer_out);
}

}  // namespace

bool has_external_refs(const Json& schema) {
    std::vector<RefSite> sites;
    collect_refs(schema, "", sites);
    const std::string base = root_base(schema);
    return std::any_of(sites.begin(), sites.end(), [&](const RefSite& s) { return !is_internal(s.ref, base); });
}

ResolverResult merge_external_refs(const Json& schema, const Resolver& resolver) {
    ResolverResult result;
    Json merged            = schema;
    const std::string base = root_base(schema);

    struct Pending {
        RefSite site;
        std::string base;  // base URI of the document the ref was written in
    };
    std::deque<Pending> work;
    {
        std::vector<RefSite> sites;
        collect_refs(merged, "", sites);
        for (auto& s : sites) {
            if (!is_internal(s.ref, base)) work.push_back({std::move(s), base});
        }
    }
    if (work.empty()) {
        result.merged_schema = std::move(merged);
        return result;
    }

    std::map<std::string, std::optional<Json>> fetched;
    std::map<std::string, std::string> inlined;  // absolute uri#fragment -> def name
    std::set<std::string> failed;

    auto fetch = [&](const std::string& uri) -> const std::optional<Json>& {
        auto it = fetched.find(uri);
        if (it != fetched.end()) return it->second;
        std::optional<Json> doc;
        if (resolver) {
            try {
                doc = resolver(uri);
            } catch (...) {
                doc.reset();
            }
        }
        return fetched.emplace(uri, std::move(doc)).first->second;
    };

    while (!work.empty()) {
        Pending p = std::move(work.front());
        work.pop_front();
        auto [uri_part, fragment] = split_fragment(p.site.ref);
        const std::string absolute = resolve_uri(p.base, uri_part);
        Json& holder = merged.at(Json::json_pointer(p.site.pointer));

        if (!base.empty() && absolute == base) {
            holder["$ref"] = "#" + fragment;
            continue;
        }
        const std::string key = absolute + "#" + fragment;
        if (auto it = inlined.find(key); it != inlined.end()) {
            holder["$ref"] = "#/$defs/" + escape_pointer_token(it->second);
            continue;
        }
        const auto& doc = fetch(absolute);
        if (!doc) {
            failed.insert(absolute);
            continue;
        }
        std::string target_pointer;
        const Json* target = resolve_fragment(*doc, fragment, &target_pointer);
        if (!target) {
            failed.insert(key);
            continue;
        }

        if (!merged.is_object()) break;  // boolean roots carry no refs
        Json& defs = merged["$defs"];
        if (!defs.is_object()) defs = Json::object();
        std::string name = def_name(absolute, fragment);
        if (defs.contains(name)) {
            int n = 2;
            while (defs.contains(name + "_" + std::to_string(n))) ++n;
            name += "_" + std::to_string(n);
        }
        inlined[key] = name;
        Json copy    = *target;
        defs[name]   = copy;
        // Re-fetch the holder: inserting into $defs may have moved it.
        merged.at(Json::json_pointer(p.site.pointer))["$ref"] = "#/$defs/" + escape_pointer_token(name);

        // Refs inside the inlined copy are relative to the fetched document.
        std::vector<RefSite> inner;
        const std::string def_pointer = "/$defs/" + escape_pointer_token(name);
        collect_refs(copy, def_pointer, inner);
        for (auto& s : inner) {
            if (!s.ref.empty() && s.ref.front() == '#') {
                // Same-document ref: targets inside the inlined subtree stay local.
                const std::string f = percent_decode(s.ref.substr(1));
                if (f.empty() || f.front() == '/') {
                    const std::string fp = canonical_pointer(f).substr(1);
                    if (fp == target_pointer || fp.rfind(target_pointer + "/", 0) == 0) {
                        merged.at(Json::json_pointer(s.pointer))["$ref"] =
                            "#" + def_pointer + fp.substr(target_pointer.size());
                        continue;
                    }
                }
                s.ref = absolute + s.ref;
            }
            work.push_back({std::move(s), absolute});
        }
    }

    if (!failed.empty()) {
        result.status      = ResolverResult::Status::Unresolvable;
        result.failed_uris = {failed.begin(), failed.end()};
        return result;
    }
    result.merged_schema = std::move(merged);
    return result;
}

ResolverResult merge_external_refs(const JsonTree& schema_json, const Resolver& resolver) {
    return merge_external_refs(schema_json.to_json(), resolver);
}

// ---------------------------------------------------------------------------
// Resolvers

std::optional<Json> DirectoryResolver::operator()(const std::string& uri) const {
    std::string path = split_fragment(uri).first;
    if (const auto scheme = path.find("://"); scheme != std::string::npos) {
        const std::string s = path.substr(0, scheme);
        if (s == "file") {
            path = path.substr(scheme + 3);
        } else {
            path = path.substr(scheme + 3);  // host/path
        }
    } else if (has_scheme(path)) {
        return std::nullopt;
    }
    const std::string normal = normalize_path(path);
    std::string rel          = normal;
    while (!rel.empty() && rel.front() == '/') rel.erase(rel.begin());
    if (rel.empty() || rel == ".." || rel.rfind("../", 0) == 0) return std::nullopt;
    std::ifstream in(root_ / rel, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    Json doc = Json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded()) return std::nullopt;
    return doc;
}

std::optional<Json> MapResolver::operator()(const std::string& uri) const {
    auto it = docs_.find(split_fragment(uri).first);
    if (it == docs_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// Compilation

const std::set<std::string, std::less<>>& SchemaDoc::dialect_keywords() {
    static const std::set<std::string, std::less<>> keywords = {
        "type",          "properties",  "required",         "additionalProperties",
        "items",         "prefixItems", "additionalItems",  "enum",
        "const",         "pattern",     "format",           "minLength",
        "maxLength",     "minimum",     "maximum",          "exclusiveMinimum",
        "exclusiveMaximum", "multipleOf", "minItems",       "maxItems",
        "uniqueItems",   "minProperties", "maxProperties",  "patternProperties",
        "oneOf",         "anyOf",       "allOf",            "not",
        "if",            "then",        "else",             "$ref",
        "$defs",         "definitions", "description",      "title",
        "default",
    };
    return keywords;
}

std::optional<SchemaId> SchemaDoc::lookup(std::string_view pointer) const {
    auto it = impl_->resolved.find(canonical_pointer(pointer));
    if (it == impl_->resolved.end()) return std::nullopt;
    return it->second;
}

namespace {

struct MetaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t non_negative_integer(const Json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0 && std::floor(d) == d && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw MetaError(where + " must be a non-negative integer");
}

double number_of(const Json& v, const std::string& where) {
    if (!v.is_number()) throw MetaError(where + " must be a number");
    return v.get<double>();
}

}  // namespace

class SchemaCompiler {
   public:
    explicit SchemaCompiler(const Json& document) : doc_(document) {}

    SchemaDoc run(std::size_t source_len) {
        compile_at(doc_, "");
        // Refs resolve after the structural pass so targets can be anywhere.
        for (std::size_t i = 0; i < pending_refs_.size(); ++i) {
            auto [id, ref] = pending_refs_[i];
            std::string fragment = ref;
            if (!fragment.empty() && fragment.front() != '#') fragment = "#" + split_fragment(ref).second;
            std::string pointer;
            const Json* target = resolve_fragment(doc_, fragment.substr(1), &pointer);
            if (!target) throw MetaError("unresolvable reference \"" + ref + "\"");
            if (!is_schema_value(*target)) throw MetaError("reference \"" + ref + "\" does not point to a schema");
            nodes_[id].ref = compile_at(*target, pointer);
        }

        auto impl          = std::make_shared<SchemaDoc::Impl>();
        impl->document     = doc_;
        impl->nodes        = std::move(nodes_);
        impl->resolved     = std::move(resolved_);
        impl->source_len   = source_len;
        impl->desc_len     = description_length(doc_);
        impl->depth        = jsonreward::depth(doc_);
        for (const char* container : {"definitions", "$defs"}) {
            for (const auto& [ptr, id] : impl->resolved) {
                const std::string prefix = std::string("#/") + container + "/";
                if (ptr.rfind(prefix, 0) == 0 && ptr.find('/', prefix.size()) == std::string::npos) {
                    impl->defs[unescape_pointer_token(ptr.substr(prefix.size()))] = id;
                }
            }
        }
        impl->cyclic = find_cycles(impl->nodes);
        SchemaDoc doc;
        doc.impl_ = std::move(impl);
        return doc;
    }

   private:
    SchemaId compile_at(const Json& value, const std::string& pointer) {
        const std::string canonical = "#" + pointer;
        if (auto it = resolved_.find(canonical); it != resolved_.end()) return it->second;
        const SchemaId id = nodes_.size();
        nodes_.emplace_back();
        resolved_[canonical] = id;
        SchemaNode node;
        node.pointer = canonical;
        if (value.is_boolean()) {
            node.boolean_schema = value.get<bool>();
        } else if (!value.is_object()) {
            throw MetaError("schema at " + canonical + " must be an object or boolean");
        } else {
            fill(node, value, pointer);
        }
        nodes_[id] = std::move(node);
        return id;
    }

    SchemaId sub(const Json& parent, const std::string& pointer, const char* keyword) {
        const Json& v = parent.at(keyword);
        if (!is_schema_value(v)) throw MetaError("#" + pointer + "/" + keyword + " must be a schema");
        return compile_at(v, pointer + "/" + escape_pointer_token(keyword));
    }

    std::vector<SchemaId> sub_array(const Json& parent, const std::string& pointer, const char* keyword) {
        const Json& v          = parent.at(keyword);
        const std::string here = "#" + pointer + "/" + keyword;
        if (!v.is_array() || v.empty()) throw MetaError(here + " must be a non-empty array of schemas");
        std::vector<SchemaId> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!is_schema_value(v[i])) throw MetaError(here + "/" + std::to_string(i) + " must be a schema");
            out.push_back(compile_at(v[i], pointer + "/" + keyword + "/" + std::to_string(i)));
        }
        return out;
    }

    void fill(SchemaNode& node, const Json& s, const std::string& pointer) {
        const std::string here = "#" + pointer;
        auto where             = [&](const char* k) { return here + "/" + k; };
        auto has               = [&](const char* k) { return s.contains(k); };

        if (has("type")) {
            const Json& t = s["type"];
            unsigned mask = 0;
            auto add      = [&](const Json& name) {
                if (!name.is_string()) throw MetaError(where("type") + " must be a type name or array of names");
                auto bit = type_bit(name.get_ref<const std::string&>());
                if (!bit) throw MetaError(where("type") + " has unknown type \"" + name.get<std::string>() + "\"");
                if (mask & *bit) throw MetaError(where("type") + " lists a type twice");
                mask |= *bit;
            };
            if (t.is_array()) {
                for (const auto& n : t) add(n);
            } else {
                add(t);
            }
            node.types = mask;
        }

        for (const char* container : {"properties", "patternProperties", "$defs", "definitions"}) {
            if (!has(container)) continue;
            const Json& m = s[container];
            if (!m.is_object()) throw MetaError(where(container) + " must be an object");
            for (auto it = m.begin(); it != m.end(); ++it) {
                const std::string child = pointer + "/" + container + "/" + escape_pointer_token(it.key());
                if (!is_schema_value(it.value())) throw MetaError("#" + child + " must be a schema");
                const SchemaId cid = compile_at(it.value(), child);
                if (std::string_view(container) == "properties") {
                    node.properties.emplace_back(it.key(), cid);
                } else if (std::string_view(container) == "patternProperties") {
                    try {
                        node.pattern_properties.emplace_back(Pattern(it.key()), cid);
                    } catch (const std::invalid_argument& e) {
                        throw MetaError("#" + child + " has an invalid regular expression: " + e.what());
                    }
                }
            }
        }

        if (has("additionalProperties")) node.additional_properties = sub(s, pointer, "additionalProperties");
        if (has("required")) {
            const Json& r = s["required"];
            if (!r.is_array()) throw MetaError(where("required") + " must be an array of strings");
            std::set<std::string> seen;
            for (const auto& name : r) {
                if (!name.is_string()) throw MetaError(where("required") + " must be an array of strings");
                if (!seen.insert(name.get<std::string>()).second) {
                    throw MetaError(where("required") + " must not repeat names");
                }
                node.required.push_back(name.get<std::string>());
            }
        }
        if (has("minProperties")) node.min_properties = non_negative_integer(s["minProperties"], where("minProperties"));
        if (has("maxProperties")) node.max_properties = non_negative_integer(s["maxProperties"], where("maxProperties"));

        if (has("items")) {
            const Json& items = s["items"];
            if (items.is_array()) {
                // Tuple form: the older spelling of prefixItems.
                for (std::size_t i = 0; i < items.size(); ++i) {
                    if (!is_schema_value(items[i])) {
                        throw MetaError(where("items") + "/" + std::to_string(i) + " must be a schema");
                    }
                    node.prefix_items.push_back(compile_at(items[i], pointer + "/items/" + std::to_string(i)));
                }
                if (has("additionalItems")) node.additional_items = sub(s, pointer, "additionalItems");
            } else {
                node.items = sub(s, pointer, "items");
            }
        }
        if (has("prefixItems")) {
            if (!node.prefix_items.empty()) throw MetaError(here + " mixes tuple items with prefixItems");
            node.prefix_items = sub_array(s, pointer, "prefixItems");
        }
        if (has("minItems")) node.min_items = non_negative_integer(s["minItems"], where("minItems"));
        if (has("maxItems")) node.max_items = non_negative_integer(s["maxItems"], where("maxItems"));
        if (has("uniqueItems")) {
            if (!s["uniqueItems"].is_boolean()) throw MetaError(where("uniqueItems") + " must be a boolean");
            node.unique_items = s["uniqueItems"].get<bool>();
        }

        if (has("enum")) {
            if (!s["enum"].is_array()) throw MetaError(where("enum") + " must be an array");
            node.enum_values = s["enum"];
        }
        if (has("const")) node.const_value = s["const"];
        if (has("pattern")) {
            if (!s["pattern"].is_string()) throw MetaError(where("pattern") + " must be a string");
            try {
                node.pattern = Pattern(s["pattern"].get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw MetaError(where("pattern") + " is an invalid regular expression: " + e.what());
            }
        }
        if (has("format")) {
            if (!s["format"].is_string()) throw MetaError(where("format") + " must be a string");
            node.format = s["format"].get<std::string>();
        }
        if (has("minLength")) node.min_length = non_negative_integer(s["minLength"], where("minLength"));
        if (has("maxLength")) node.max_length = non_negative_integer(s["maxLength"], where("maxLength"));

        if (has("minimum")) node.minimum = number_of(s["minimum"], where("minimum"));
        if (has("maximum")) node.maximum = number_of(s["maximum"], where("maximum"));
        for (const char* k : {"exclusiveMinimum", "exclusiveMaximum"}) {
            if (!has(k)) continue;
            const Json& v     = s[k];
            const bool is_min = std::string_view(k) == "exclusiveMinimum";
            if (v.is_boolean()) {
                // Older drafts: a flag that makes minimum/maximum exclusive.
                if (v.get<bool>()) {
                    auto& bound = is_min ? node.minimum : node.maximum;
                    if (bound) {
                        (is_min ? node.exclusive_minimum : node.exclusive_maximum) = bound;
                        bound.reset();
                    }
                }
            } else {
                (is_min ? node.exclusive_minimum : node.exclusive_maximum) = number_of(v, where(k));
            }
        }
        if (has("multipleOf")) {
            const double m = number_of(s["multipleOf"], where("multipleOf"));
            if (!(m > 0)) throw MetaError(where("multipleOf") + " must be greater than 0");
            node.multiple_of       = m;
            node.multiple_of_exact = json_decimal(s["multipleOf"]);
        }

        if (has("allOf")) node.all_of = sub_array(s, pointer, "allOf");
        if (has("anyOf")) node.any_of = sub_array(s, pointer, "anyOf");
        if (has("oneOf")) node.one_of = sub_array(s, pointer, "oneOf");
        if (has("not")) node.not_schema = sub(s, pointer, "not");
        if (has("if")) node.if_schema = sub(s, pointer, "if");
        if (has("then")) node.then_schema = sub(s, pointer, "then");
        if (has("else")) node.else_schema = sub(s, pointer, "else");

        if (has("$ref")) {
            if (!s["$ref"].is_string()) throw MetaError(where("$ref") + " must be a string");
            node.ref_text = s["$ref"].get<std::string>();
            if (!is_internal(node.ref_text, root_base(doc_))) {
                throw MetaError(where("$ref") + " is an external reference \"" + node.ref_text + "\"");
            }
            pending_refs_.emplace_back(resolved_.at(here), node.ref_text);
        }

        for (const char* k : {"description", "title"}) {
            if (has(k) && !s[k].is_string()) throw MetaError(where(k) + " must be a string");
        }
        if (has("description")) node.description = s["description"].get<std::string>();
        for (const char* k : {"$id", "$schema", "$anchor", "$comment"}) {
            if (has(k) && !s[k].is_string()) throw MetaError(where(k) + " must be a string");
        }
    }

    static std::vector<std::pair<SchemaId, SchemaId>> find_cycles(const std::vector<SchemaNode>& nodes) {
        // Iterative DFS over structural and $ref edges; a $ref edge into a node
        // still on the stack closes a cycle.
        std::vector<std::pair<SchemaId, SchemaId>> cyclic;
        enum Color : unsigned char { White, Gray, Black };
        std::vector<Color> color(nodes.size(), White);
        auto edges = [&](SchemaId id) {
            const auto& n = nodes[id];
            std::vector<std::pair<SchemaId, bool>> out;
            for (const auto& [k, c] : n.properties) out.emplace_back(c, false);
            for (const auto& [p, c] : n.pattern_properties) out.emplace_back(c, false);
            for (auto c : {n.additional_properties, n.items, n.additional_items, n.not_schema, n.if_schema,
                           n.then_schema, n.else_schema}) {
                if (c) out.emplace_back(*c, false);
            }
            for (const auto* list : {&n.prefix_items, &n.all_of, &n.any_of, &n.one_of}) {
                for (auto c : *list) out.emplace_back(c, false);
            }
            if (n.ref) out.emplace_back(*n.ref, true);
            return out;
        };
        for (SchemaId start = 0; start < nodes.size(); ++start) {
            if (color[start] != White) continue;
            struct Frame {
                SchemaId id;
                std::vector<std::pair<SchemaId, bool>> out;
                std::size_t next = 0;
            };
            std::vector<Frame> stack;
            stack.push_back({start, edges(start)});
            color[start] = Gray;
            while (!stack.empty()) {
                Frame& f = stack.back();
                if (f.next == f.out.size()) {
                    color[f.id] = Black;
                    stack.pop_back();
                    continue;
                }
                auto [to, is_ref] = f.out[f.next++];
                if (color[to] == Gray) {
                    if (is_ref) cyclic.emplace_back(f.id, to);
                } else if (color[to] == White) {
                    color[to] = Gray;
                    const SchemaId from = to;
                    stack.push_back({from, edges(from)});
                }
            }
        }
        std::sort(cyclic.begin(), cyclic.end());
        cyclic.erase(std::unique(cyclic.begin(), cyclic.end()), cyclic.end());
        return cyclic;
    }

    const Json& doc_;
    std::vector<SchemaNode> nodes_;
    std::map<std::string, SchemaId> resolved_;
    std::vector<std::pair<SchemaId, std::string>> pending_refs_;
};

CompileResult compile(const Json& schema, const Resolver& resolver, std::optional<std::size_t> source_len) {
    const std::size_t len = source_len ? *source_len : utf8::length(to_text(schema));
    const Json* doc       = &schema;
    Json merged;
    if (has_external_refs(schema)) {
        if (!resolver) return CompileError{"external references require a resolver"};
        auto r = merge_external_refs(schema, resolver);
        if (r.status == ResolverResult::Status::Unresolvable) {
            std::string reason = "unresolvable external reference";
            for (const auto& uri : r.failed_uris) reason += " " + uri;
            return CompileError{reason};
        }
        merged = std::move(*r.merged_schema);
        doc    = &merged;
    }
    try {
        SchemaCompiler compiler(*doc);
        return compiler.run(len);
    } catch (const MetaError& e) {
        return CompileError{e.what()};
    }
}

CompileResult compile(const JsonTree& schema_json, const Resolver& resolver) {
    return compile(schema_json.to_json(), resolver, utf8::length(schema_json.source()));
}

CompileResult compile_text(std::string_view text, const Resolver& resolver) {
    auto parsed = parse(text, Dialect::Json);
    if (!parsed) return CompileError{"schema is not valid JSON: " + parsed.failure().message};
    return compile(parsed.tree(), resolver);
}

// ---------------------------------------------------------------------------
// Corpus statistics

CorpusStats corpus_stats(std::span<const SchemaDoc> schemas) {
    if (schemas.empty()) throw std::invalid_argument("corpus_stats requires at least one schema");
    CorpusStats stats;
    stats.count = schemas.size();
    double src = 0, desc = 0, dep = 0;
    for (const auto& s : schemas) {
        src += static_cast<double>(s.source_len());
        desc += static_cast<double>(s.desc_len());
        dep += static_cast<double>(s.depth());
        if (s.source_len() < 2000) ++stats.under_2k;
        if (s.source_len() < 4000) ++stats.under_4k;
        if (s.source_len() < 10000) ++stats.under_10k;
    }
    const auto n          = static_cast<double>(stats.count);
    stats.mean_source_len = src / n;
    stats.mean_desc_len   = desc / n;
    stats.mean_depth      = dep / n;
    return stats;
}

Json to_json(const CorpusStats& stats) {
    Json out;
    out["count"]           = stats.count;
    out["mean_source_len"] = stats.mean_source_len;
    out["mean_desc_len"]   = stats.mean_desc_len;
    out["mean_depth"]      = stats.mean_depth;
    out["histogram"]       = {{"lt_2k", stats.under_2k}, {"lt_4k", stats.under_4k}, {"lt_10k", stats.under_10k}};
    return out;
}

}  // namespace jsonreward
