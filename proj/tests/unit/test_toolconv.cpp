#include <doctest.h>

#include <random>

#include "jsonreward/taskgen.hpp"
#include "jsonreward/toolconv.hpp"
#include "jsonreward/validator.hpp"
#include "support/oracle.hpp"

using namespace jsonreward;

namespace {

bool accepts(const Json& schema, const Json& instance) {
    const auto s = compile(schema).value();
    const auto p = parse(to_text(instance), Dialect::Json);
    return p && is_valid(p.tree(), s);
}

const char* kInformal[] = {"str", "int", "float", "bool", "dict", "list", "tuple", "string", "integer", "number", "boolean"};

Json random_params(std::mt19937_64& rng, int depth) {
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    Json props = Json::object();
    Json required = Json::array();
    const auto n = pick(4);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string key = "p" + std::to_string(i);
        const std::string type = kInformal[pick(std::size(kInformal))];
        Json p = {{"type", type}, {"description", "param " + key}};
        if ((type == "dict") && depth > 0) p = random_params(rng, depth - 1);
        if (type == "list" || type == "tuple") p["items"] = {{"type", kInformal[pick(4)]}};
        if (type == "str" && pick(3) == 0) p["enum"] = {"celsius", "fahrenheit"};
        props[key] = p;
        if (pick(2)) required.push_back(key);
    }
    Json out = {{"type", pick(2) ? "dict" : "object"}, {"properties", props}};
    if (!required.empty()) out["required"] = required;
    return out;
}

}  // namespace

TEST_CASE("normalize_types") {
    CHECK(normalize_types(Json::parse(R"({"type":"dict"})")) == Json::parse(R"({"type":"object"})"));
    CHECK(normalize_types(Json::parse(R"({"type":"list","items":{"type":"int"}})")) ==
          Json::parse(R"({"type":"array","items":{"type":"integer"}})"));
    const Json standard = Json::parse(R"({"type":"object","properties":{"a":{"type":["string","null"]}},"required":["a"]})");
    CHECK(normalize_types(standard) == standard);
    CHECK(normalize_types(Json::parse(R"({"type":["str","float","mystery"]})")) ==
          Json::parse(R"({"type":["string","number","mystery"]})"));
    // Property names and data are not types.
    const Json tricky = Json::parse(
        R"({"type":"dict","properties":{"type":{"type":"str","enum":["dict","list"]},"dict":{"const":{"type":"int"}}}})");
    CHECK(normalize_types(tricky) == Json::parse(
        R"({"type":"object","properties":{"type":{"type":"string","enum":["dict","list"]},"dict":{"const":{"type":"int"}}}})"));
    CHECK(normalize_types(Json::parse(R"({"anyOf":[{"type":"bool"},{"items":[{"type":"tuple"}]}]})")) ==
          Json::parse(R"({"anyOf":[{"type":"boolean"},{"items":[{"type":"array"}]}]})"));
}

TEST_CASE("pointer_escape") {
    CHECK(pointer_escape("a/b") == "a~1b");
    CHECK(pointer_escape("a~b") == "a~0b");
    CHECK(pointer_escape("a/b~c") == "a~1b~0c");
    CHECK(pointer_escape("~1") == "~01");
    std::mt19937_64 rng(8);
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        const auto len = rng() % 8;
        for (std::size_t j = 0; j < len; ++j) s += "~/01ab"[rng() % 6];
        CHECK(unescape_pointer_token(pointer_escape(s)) == s);
    }
}

TEST_CASE("convert: golden output") {
    const std::vector<ToolDef> tools = {ToolDef::from_json(Json::parse(R"({"name":"get_weather","description":"Current weather",
        "parameters":{"type":"dict","properties":{"city":{"type":"str"}},"required":["city"]}})"))};
    const Json expected = Json::parse(R"({
      "$defs": {
        "tools": {"description": "Available tools you could use.", "oneOf": [{"$ref": "#/$defs/get_weather"}]},
        "get_weather": {
          "type": "object",
          "description": "Current weather",
          "properties": {"get_weather": {"type": "object", "properties": {"city": {"type": "string"}}, "required": ["city"]}},
          "required": ["get_weather"],
          "additionalProperties": false
        }
      },
      "oneOf": [
        {"type": "array", "description": "Calling multiple tools in a array.", "items": {"$ref": "#/$defs/tools"}, "minItems": 2},
        {"$ref": "#/$defs/tools"},
        {"type": "string", "description": "If none of the function can be used, point it out here. If the given question lacks the parameters required by the function, also point it out here."}
      ]
    })");
    const auto out = convert(tools);
    REQUIRE(out);
    CHECK(out.value().dump() == expected.dump());
}

TEST_CASE("convert: names, defaults and errors") {
    std::vector<ToolDef> tools = {ToolDef::from_json(Json::parse(R"({"type":"function","function":{"name":"a/b"}})")),
                                  ToolDef::from_json(Json::parse(R"({"name":"x~y","parameters":{"type":"dict"}})"))};
    auto out = convert(tools).value();
    CHECK(out["$defs"]["tools"]["oneOf"][0]["$ref"] == "#/$defs/a~1b");
    CHECK(out["$defs"]["tools"]["oneOf"][1]["$ref"] == "#/$defs/x~0y");
    CHECK(out["$defs"]["a/b"]["description"] == "");
    CHECK(out["$defs"]["a/b"]["properties"]["a/b"] == Json::parse(R"({"type":"object","properties":{}})"));
    CHECK(accepts(out, Json::parse(R"({"a/b":{}})")));
    CHECK(accepts(out, Json::parse(R"([{"a/b":{}},{"x~y":{}}])")));

    CHECK_FALSE(convert(std::vector<ToolDef>{}));
    CHECK_FALSE(convert(std::vector<ToolDef>{tools[0], tools[0]}));
    CHECK_FALSE(convert(std::vector<ToolDef>{ToolDef{"tools", "", std::nullopt}}));
    CHECK_FALSE(convert(std::vector<ToolDef>{ToolDef{"t", "", Json::parse(R"({"type":"any"})")}}));
    CHECK_THROWS_AS(ToolDef::from_json(Json::parse(R"({"description":"no name"})")), std::invalid_argument);
    CHECK_THROWS_AS(ToolDef::from_json(Json::parse(R"({"name":""})")), std::invalid_argument);
}

TEST_CASE("convert: fuzz over tool shapes") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 300; ++round) {
        std::vector<ToolDef> tools;
        const auto n = 1 + rng() % 4;
        for (std::size_t i = 0; i < n; ++i) {
            ToolDef t;
            t.name        = "tool_" + std::to_string(i) + (rng() % 3 == 0 ? "/v1" : "");
            t.description = rng() % 2 ? "does thing " + std::to_string(i) : "";
            if (rng() % 5) t.parameters = random_params(rng, 2);
            tools.push_back(t);
        }
        const auto converted = convert(tools);
        REQUIRE(converted);
        const Json& schema = converted.value();
        const auto doc     = compile(schema).value();

        std::vector<Json> calls;
        for (const auto& t : tools) {
            const Json params = t.parameters ? normalize_types(*t.parameters) : Json{{"type", "object"}};
            const auto args   = satisfying_instance(compile(params).value());
            REQUIRE(args);
            const Json call = {{t.name, *args}};
            CHECK(accepts(schema, call));
            CHECK(oracle::valid(call, schema));
            calls.push_back(call);
            CHECK_FALSE(accepts(schema, Json::array({call})));
        }
        if (calls.size() >= 2) CHECK(accepts(schema, Json(calls)));
        CHECK_FALSE(accepts(schema, Json{{"unknown_tool", Json::object()}}));
        CHECK(accepts(schema, "I cannot help with that"));
        CHECK(accepts(schema, ""));
        CHECK(doc.node_count() > 0);
    }
}
