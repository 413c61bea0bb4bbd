#include "jsonreward/toolconv.hpp"

#include <set>
#include <stdexcept>

#include "jsonreward/embedded.hpp"
#include "jsonreward/schema.hpp"

namespace jsonreward {

namespace {

const Json& aliases() {
    static const Json t = Json::parse(embedded::type_aliases());
    return t;
}

Json alias(const Json& type) {
    if (type.is_string()) {
        auto it = aliases().find(type.get_ref<const std::string&>());
        return it == aliases().end() ? type : *it;
    }
    if (type.is_array()) {
        Json out = Json::array();
        for (const auto& t : type) out.push_back(alias(t));
        return out;
    }
    return type;
}

void normalize_in_place(Json& s) {
    if (!s.is_object()) return;
    static const std::set<std::string, std::less<>> maps = {"properties", "patternProperties", "$defs", "definitions",
                                                            "dependentSchemas"};
    static const std::set<std::string, std::less<>> single = {
        "items", "additionalProperties", "additionalItems", "not", "if", "then", "else", "contains",
        "propertyNames", "unevaluatedProperties", "unevaluatedItems"};
    static const std::set<std::string, std::less<>> lists = {"allOf", "anyOf", "oneOf", "prefixItems", "items"};
    for (auto& [key, value] : s.items()) {
        if (key == "type") {
            value = alias(value);
        } else if (maps.count(key) && value.is_object()) {
            for (auto& [k, sub] : value.items()) normalize_in_place(sub);
        } else if (lists.count(key) && value.is_array()) {
            for (auto& sub : value) normalize_in_place(sub);
        } else if (single.count(key)) {
            normalize_in_place(value);
        }
    }
}

}  // namespace

ToolDef ToolDef::from_json(const Json& record) {
    const Json* f = &record;
    if (record.is_object() && record.contains("function") && record["function"].is_object()) f = &record["function"];
    if (!f->is_object()) throw std::invalid_argument("tool definition must be an object");
    auto name = f->find("name");
    if (name == f->end() || !name->is_string() || name->get_ref<const std::string&>().empty()) {
        throw std::invalid_argument("tool definition needs a non-empty string \"name\"");
    }
    ToolDef t;
    t.name = name->get<std::string>();
    if (auto d = f->find("description"); d != f->end() && d->is_string()) t.description = d->get<std::string>();
    if (auto p = f->find("parameters"); p != f->end() && !p->is_null()) t.parameters = *p;
    return t;
}

Json normalize_types(const Json& node) {
    Json out = node;
    normalize_in_place(out);
    return out;
}

std::string pointer_escape(std::string_view name) {
    std::string out;
    for (char c : name) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

Result<Json, ToolconvError> convert(std::span<const ToolDef> tools) {
    if (tools.empty()) return ToolconvError{"no tools to convert"};
    std::set<std::string> names;
    for (const auto& t : tools) {
        if (t.name.empty()) return ToolconvError{"tool with an empty name"};
        if (t.name == "tools") return ToolconvError{"tool name \"tools\" collides with the $defs.tools union"};
        if (!names.insert(t.name).second) return ToolconvError{"duplicate tool name " + t.name};
    }

    Json schema;
    schema["$defs"]["tools"] = {{"description", "Available tools you could use."}, {"oneOf", Json::array()}};
    for (const auto& t : tools) {
        Json params = t.parameters ? normalize_types(*t.parameters) : Json{{"type", "object"}, {"properties", Json::object()}};
        schema["$defs"][t.name] = {{"type", "object"},
                                   {"description", t.description},
                                   {"properties", {{t.name, std::move(params)}}},
                                   {"required", {t.name}},
                                   {"additionalProperties", false}};
        schema["$defs"]["tools"]["oneOf"].push_back({{"$ref", "#/$defs/" + pointer_escape(t.name)}});
    }
    schema["oneOf"] = Json::array({
        {{"type", "array"},
         {"description", "Calling multiple tools in a array."},
         {"items", {{"$ref", "#/$defs/tools"}}},
         {"minItems", 2}},
        {{"$ref", "#/$defs/tools"}},
        {{"type", "string"},
         {"description",
          "If none of the function can be used, point it out here. If the given question lacks the parameters "
          "required by the function, also point it out here."}},
    });
    auto compiled = compile(schema);
    if (!compiled) return ToolconvError{"converted schema is not valid: " + compiled.error().reason};
    return schema;
}

}  // namespace jsonreward
