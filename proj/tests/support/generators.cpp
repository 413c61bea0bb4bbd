#include "support/generators.hpp"

#include <algorithm>

namespace gen {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

}  // namespace

std::vector<Json> all_values(std::size_t max_nodes, const std::vector<std::string>& strings,
                             const std::vector<Json>& numbers) {
    // exact[n] = values with exactly n nodes.
    std::vector<std::vector<Json>> exact(max_nodes + 1);
    if (max_nodes == 0) return {};
    exact[1] = {Json(nullptr), Json(true), Json(false), Json::array(), Json::object()};
    for (const auto& n : numbers) exact[1].push_back(n);
    for (const auto& s : strings) exact[1].push_back(Json(s));

    for (std::size_t n = 2; n <= max_nodes; ++n) {
        // Arrays: ordered child sequences whose sizes sum to n - 1.
        std::vector<Json> arrays;
        std::vector<std::pair<Json, std::size_t>> partial{{Json::array(), 0}};
        while (!partial.empty()) {
            auto [arr, used] = partial.back();
            partial.pop_back();
            if (used == n - 1) {
                arrays.push_back(arr);
                continue;
            }
            for (std::size_t sz = 1; used + sz <= n - 1; ++sz) {
                for (const auto& child : exact[sz]) {
                    Json next = arr;
                    next.push_back(child);
                    partial.emplace_back(std::move(next), used + sz);
                }
            }
        }
        // Objects: members under strictly increasing keys.
        std::vector<Json> objects;
        struct Obj {
            Json value;
            std::size_t used;
            std::size_t next_key;
        };
        std::vector<Obj> pending{{Json::object(), 0, 0}};
        while (!pending.empty()) {
            Obj o = std::move(pending.back());
            pending.pop_back();
            if (o.used == n - 1) {
                objects.push_back(o.value);
                continue;
            }
            for (std::size_t k = o.next_key; k < strings.size(); ++k) {
                for (std::size_t sz = 1; o.used + sz <= n - 1; ++sz) {
                    for (const auto& child : exact[sz]) {
                        Json next          = o.value;
                        next[strings[k]]   = child;
                        pending.push_back({std::move(next), o.used + sz, k + 1});
                    }
                }
            }
        }
        exact[n] = std::move(arrays);
        exact[n].insert(exact[n].end(), objects.begin(), objects.end());
    }
    std::vector<Json> out;
    for (const auto& bucket : exact) out.insert(out.end(), bucket.begin(), bucket.end());
    return out;
}

std::vector<Json> instance_grid() {
    return all_values(4, {"", "a", "ab"}, {Json(0), Json(1), Json(-1), Json(1.5)});
}

std::vector<Json> keyword_corpus() {
    const char* texts[] = {
        R"({"type":"string"})",
        R"({"type":["integer","null"]})",
        R"({"type":"number"})",
        R"({"type":"boolean"})",
        R"({"type":"object","properties":{"a":{"type":"integer"}}})",
        R"({"required":["a"]})",
        R"({"properties":{"a":{}},"additionalProperties":false})",
        R"({"additionalProperties":{"type":"string"}})",
        R"({"items":{"type":"number"}})",
        R"({"prefixItems":[{"type":"string"},{"type":"null"}]})",
        R"({"prefixItems":[{"type":"string"}],"items":false})",
        R"({"items":[{"type":"string"}],"additionalItems":false})",
        R"({"enum":[1,"a",null,[1],{"a":true}]})",
        R"({"const":{"ab":[]}})",
        R"({"const":1.0})",
        R"({"pattern":"^a"})",
        R"({"pattern":"b$"})",
        R"({"format":"email"})",
        R"({"minLength":1,"maxLength":1})",
        R"({"minimum":0,"maximum":1})",
        R"({"exclusiveMinimum":0,"exclusiveMaximum":1.5})",
        R"({"multipleOf":0.5})",
        R"({"multipleOf":2})",
        R"({"minItems":1,"maxItems":2})",
        R"({"uniqueItems":true})",
        R"({"minProperties":1,"maxProperties":1})",
        R"({"patternProperties":{"^a":{"type":"boolean"}}})",
        R"({"oneOf":[{"type":"number"},{"type":"integer"}]})",
        R"({"anyOf":[{"type":"string"},{"minItems":2}]})",
        R"({"allOf":[{"type":"array"},{"items":{"type":"string"}}]})",
        R"({"not":{"type":"null"}})",
        R"({"if":{"type":"string"},"then":{"minLength":2},"else":{"type":"array"}})",
        R"({"$ref":"#/$defs/s","$defs":{"s":{"type":"string"}}})",
        R"({"definitions":{"n":{"type":["array","null"],"items":{"$ref":"#/definitions/n"}}},"$ref":"#/definitions/n"})",
        R"({"description":"d","title":"t","default":1})",
        R"({"type":"integer","minimum":-1})",
        R"(false)",
        R"(true)",
        R"({"properties":{"a":{"type":"string"}},"required":["ab"],"additionalProperties":{"type":"number"}})",
        R"({"items":{"type":"object","properties":{"":{"const":1.5}}}})",
        R"({"type":"object","properties":{"a":{"type":"array","items":{"enum":[0,"ab"]}}},"required":["a"]})",
    };
    std::vector<Json> out;
    for (const char* t : texts) out.push_back(Json::parse(t));
    return out;
}

Json random_value(std::mt19937_64& rng, int depth) {
    const std::size_t choice = pick(rng, depth > 0 ? 8 : 6);
    static const char* words[] = {"", "a", "ab", "x\ny", "q\"", "\\", "é", "long text value"};
    switch (choice) {
        case 0: return nullptr;
        case 1: return pick(rng, 2) == 0;
        case 2: return static_cast<int>(pick(rng, 200)) - 100;
        case 3: return std::uniform_real_distribution<double>(-50, 50)(rng);
        case 4:
        case 5: return words[pick(rng, std::size(words))];
        case 6: {
            Json arr = Json::array();
            for (std::size_t i = pick(rng, 4); i > 0; --i) arr.push_back(random_value(rng, depth - 1));
            return arr;
        }
        default: {
            Json obj = Json::object();
            for (std::size_t i = pick(rng, 4); i > 0; --i) {
                obj[std::string(1, static_cast<char>('a' + pick(rng, 6)))] = random_value(rng, depth - 1);
            }
            return obj;
        }
    }
}

namespace {

Json random_schema_at(std::mt19937_64& rng, int depth, const std::string& at) {
    static const char* scalar_types[] = {"string", "integer", "number", "boolean", "null"};
    const std::size_t choice          = pick(rng, depth > 0 ? 10 : 5);
    Json s                            = Json::object();
    switch (choice) {
        case 0:
            s["type"] = "string";
            if (pick(rng, 2)) s["minLength"] = pick(rng, 3);
            if (pick(rng, 3) == 0) s["maxLength"] = 3 + pick(rng, 10);
            if (pick(rng, 4) == 0) s["pattern"] = "^[a-z]*$";
            if (pick(rng, 5) == 0) s["enum"] = {"a", "bb", "ccc"};
            break;
        case 1:
            s["type"] = "integer";
            if (pick(rng, 2)) s["minimum"] = -5;
            if (pick(rng, 2)) s["maximum"] = 50;
            if (pick(rng, 4) == 0) s["multipleOf"] = 5;
            break;
        case 2:
            s["type"] = "number";
            if (pick(rng, 2)) s["exclusiveMinimum"] = -1.5;
            break;
        case 3: s["type"] = scalar_types[pick(rng, std::size(scalar_types))]; break;
        case 4: s["const"] = random_value(rng, 1); break;
        case 5:
        case 6: {
            s["type"]       = "object";
            Json props      = Json::object();
            Json required   = Json::array();
            const auto n    = 1 + pick(rng, 4);
            for (std::size_t i = 0; i < n; ++i) {
                const std::string key = "k" + std::to_string(i);
                props[key]            = random_schema_at(rng, depth - 1, at + "/properties/" + key);
                if (pick(rng, 2)) required.push_back(key);
            }
            s["properties"] = props;
            if (!required.empty()) s["required"] = required;
            if (pick(rng, 3) == 0) s["additionalProperties"] = false;
            break;
        }
        case 7:
            s["type"]  = "array";
            s["items"] = random_schema_at(rng, depth - 1, at + "/items");
            if (pick(rng, 3) == 0) s["minItems"] = 1;
            if (pick(rng, 4) == 0) s["maxItems"] = 4;
            if (pick(rng, 5) == 0) s["uniqueItems"] = true;
            break;
        case 8: {
            const char* kw = pick(rng, 2) ? "anyOf" : "oneOf";
            s[kw] = {random_schema_at(rng, depth - 1, at + "/" + kw + "/0"),
                     random_schema_at(rng, depth - 1, at + "/" + kw + "/1")};
            break;
        }
        default:
            s["$defs"] = {{"d", random_schema_at(rng, depth - 1, at + "/$defs/d")}};
            s["$ref"]  = at + "/$defs/d";
            break;
    }
    if (pick(rng, 4) == 0) s["description"] = "field " + std::to_string(pick(rng, 100));
    return s;
}

}  // namespace

Json random_schema(std::mt19937_64& rng, int depth) { return random_schema_at(rng, depth, "#"); }

namespace {

const char* kWords[] = {"name", "title", "city", "email", "note", "label", "owner", "status", "code", "path",
                        "url", "tag", "kind", "summary", "comment", "author"};

Json task_object(std::mt19937_64& rng, int depth, bool& used_def);

Json task_field(std::mt19937_64& rng, int depth, bool& used_def) {
    switch (pick(rng, depth > 0 ? 13 : 10)) {
        case 0:
        case 1: return {{"type", "string"}, {"description", "free text"}};
        case 2: return {{"type", "string"}};
        case 3: return {{"type", "string"}, {"format", pick(rng, 2) ? "email" : "date"}};
        case 4: return {{"type", "string"}, {"minLength", 1 + pick(rng, 4)}, {"maxLength", 40}};
        case 5: return {{"type", "string"}, {"enum", {"low", "medium", "high"}}};
        case 6: {
            Json f = {{"type", "integer"}, {"minimum", -3 + static_cast<int>(pick(rng, 5))}, {"maximum", 1000}};
            if (pick(rng, 2)) f["multipleOf"] = 1 + pick(rng, 6);
            return f;
        }
        case 7: return {{"type", "number"}, {"exclusiveMinimum", 0}, {"description", "positive amount"}};
        case 8: return {{"type", pick(rng, 2) ? "boolean" : "null"}};
        case 9: return {{"type", {"string", "null"}}};
        case 10: {
            Json items = pick(rng, 2) ? Json{{"type", "string"}} : task_object(rng, depth - 1, used_def);
            return {{"type", "array"}, {"items", items}, {"minItems", pick(rng, 3)}};
        }
        case 11:
            if (pick(rng, 2)) {
                used_def = true;
                return {{"$ref", "#/$defs/address"}};
            }
            return {{"oneOf", {{{"type", "string"}, {"maxLength", 20}}, {{"type", "integer"}}}}};
        default: return task_object(rng, depth - 1, used_def);
    }
}

Json task_object(std::mt19937_64& rng, int depth, bool& used_def) {
    Json props    = Json::object();
    Json required = Json::array();
    const std::size_t n = 1 + pick(rng, 5);
    const std::size_t first = pick(rng, std::size(kWords));
    props[kWords[first]] = {{"type", "string"}, {"description", "the " + std::string(kWords[first])}};
    if (pick(rng, 2)) required.push_back(kWords[first]);
    for (std::size_t i = 0; i < n; ++i) {
        std::string key = kWords[pick(rng, std::size(kWords))];
        if (props.contains(key)) key += "_" + std::to_string(i);
        props[key] = task_field(rng, depth, used_def);
        if (pick(rng, 2)) required.push_back(key);
    }
    Json s = {{"type", "object"}, {"properties", props}};
    if (!required.empty()) s["required"] = required;
    if (pick(rng, 3) == 0) s["additionalProperties"] = false;
    return s;
}

}  // namespace

Json task_schema(std::mt19937_64& rng, int depth) {
    bool used_def = false;
    Json s = task_object(rng, depth, used_def);
    if (used_def) {
        s["$defs"] = {{"address",
                       {{"type", "object"},
                        {"properties", {{"street", {{"type", "string"}}}, {"zip", {{"type", "string"}, {"pattern", "^[0-9]{5}$"}}}}},
                        {"required", {"street", "zip"}}}}};
    }
    return s;
}

CurationCorpus curation_corpus(std::mt19937_64& rng, std::size_t n) {
    CurationCorpus c;
    c.remote["common.json"] = Json::parse(
        R"({"$defs":{"tag":{"type":"string","maxLength":30},"pair":{"type":"array","items":{"$ref":"#/$defs/tag"},"minItems":2}}})");
    c.remote["https://schemas.example.com/money.json"] =
        Json::parse(R"({"type":"object","properties":{"amount":{"type":"number"},"currency":{"type":"string"}},"required":["amount"]})");
    static const char* invalid[] = {R"({"type":5})", R"({"type":"object","properties":{"a":{"minLength":-1}}})",
                                    R"({"pattern":"("})", R"({"multipleOf":0})", R"({"allOf":[]})",
                                    R"({"type":"strin"})", R"({"required":"a"})"};
    for (std::size_t i = 0; i < n; ++i) {
        const std::string id = "doc" + std::to_string(i) + ".json";
        Json s = task_schema(rng, 2);
        switch (pick(rng, 8)) {
            case 0:
            case 1:
            case 2:
                c.docs.emplace_back(id, s.dump(pick(rng, 2) ? 2 : -1));
                ++c.expect_kept;
                break;
            case 3:
                s["properties"]["tags"] = {{"$ref", pick(rng, 2) ? "common.json#/$defs/pair" : "common.json#/$defs/tag"}};
                if (pick(rng, 2)) s["properties"]["price"] = {{"$ref", "https://schemas.example.com/money.json"}};
                c.docs.emplace_back(id, s.dump());
                ++c.expect_kept;
                break;
            case 4:
                s["properties"]["ext"] = {{"$ref", pick(rng, 2) ? "missing.json" : "common.json#/$defs/nothing"}};
                c.docs.emplace_back(id, s.dump());
                ++c.expect_unresolvable;
                break;
            case 5:
                c.docs.emplace_back(id, invalid[pick(rng, std::size(invalid))]);
                ++c.expect_invalid;
                break;
            case 6: {
                const std::string text = s.dump();
                c.docs.emplace_back(id, text.substr(0, 1 + pick(rng, text.size() - 1)));
                ++c.expect_invalid;
                break;
            }
            default:
                s["properties"]["bad"] = {{"type", "object"}, {"minProperties", "two"}};
                c.docs.emplace_back(id, s.dump());
                ++c.expect_invalid;
                break;
        }
    }
    return c;
}

std::string mutate_text(std::mt19937_64& rng, const std::string& text) {
    std::string out = text;
    static const char pieces[] = "{}[]:,\"\\ 0a-.etn";
    switch (pick(rng, 4)) {
        case 0:
            if (!out.empty()) out.erase(pick(rng, out.size()), 1);
            break;
        case 1: out.insert(out.begin() + static_cast<long>(pick(rng, out.size() + 1)), pieces[pick(rng, sizeof(pieces) - 1)]); break;
        case 2:
            if (!out.empty()) out[pick(rng, out.size())] = pieces[pick(rng, sizeof(pieces) - 1)];
            break;
        default: out = out.substr(0, pick(rng, out.size() + 1)); break;
    }
    return out;
}

Json mutate_value(std::mt19937_64& rng, const Json& value) {
    if (value.is_object() && !value.empty() && pick(rng, 2)) {
        Json out   = value;
        auto it    = out.begin();
        std::advance(it, static_cast<long>(pick(rng, out.size())));
        const auto key = it.key();
        switch (pick(rng, 3)) {
            case 0: out.erase(key); break;
            case 1: out[key] = mutate_value(rng, out[key]); break;
            default: out["zz_extra"] = random_value(rng, 1); break;
        }
        return out;
    }
    if (value.is_array() && !value.empty() && pick(rng, 2)) {
        Json out       = value;
        const auto idx = pick(rng, out.size());
        if (pick(rng, 2)) {
            out[idx] = mutate_value(rng, out[idx]);
        } else {
            out.erase(idx);
        }
        return out;
    }
    if (value.is_string() && pick(rng, 2)) return value.get<std::string>() + "Z9!";
    if (value.is_number_integer() && pick(rng, 2)) return value.get<long long>() * 7 + 1000;
    return random_value(rng, 1);
}

std::string random_bytes(std::mt19937_64& rng, std::size_t max_len) {
    std::string s(pick(rng, max_len + 1), '\0');
    const bool jsonish = pick(rng, 2);
    static const char alphabet[] = "{}[]:,\"\\/*' \n\t0123456789.eE+-truefalsnlINfy@x";
    for (auto& c : s) {
        c = jsonish ? alphabet[pick(rng, sizeof(alphabet) - 1)] : static_cast<char>(pick(rng, 256));
    }
    return s;
}

}  // namespace gen
