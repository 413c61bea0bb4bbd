#include <doctest.h>

#include <random>
#include <set>

#include "jsonreward/lex.hpp"
#include "jsonreward/taskgen.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace jsonreward;

namespace {

SchemaDoc doc(std::string_view text) { return compile_text(text).value(); }

const char* kPerson = R"({"type":"object","properties":{"name":{"type":"string"},"data":{"type":"string","description":"payload"},"age":{"type":"integer"}},"required":["name"]})";

std::size_t cps(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
}

TaskInstance custom_with(const char* schema, const char* field, const CustomRule& rule) {
    auto injected = inject_rule(doc(schema), field, rule);
    TaskInstance t;
    t.kind   = TaskKind::CustomFormats;
    t.schema = injected.value();
    std::string inst(field);
    inst = inst.substr(inst.rfind('/'));
    t.hidden = CustomHidden{{{{field, inst}, rule}}};
    return t;
}

}  // namespace

TEST_CASE("prompts follow the templates") {
    const auto s = doc(R"({"type":"object","properties":{"a":{"type":"string"}}})");
    auto t = gen_complex(s);
    CHECK(t.prompt.system ==
          "You should generate answer with given JSON format.\n<Schema> Here are the json-schema of the content format:\n"
          "{\n  \"type\": \"object\",\n  \"properties\": {\n    \"a\": {\n      \"type\": \"string\"\n    }\n  }\n}\n</Schema>");
    CHECK(t.prompt.user ==
          "Please generate a valid JSON object according to the JSON schema. Give your JSON object directly, without ```.");
    CHECK(std::holds_alternative<std::monostate>(t.hidden));

    auto e = gen_escape(s, 3).value();
    const auto& special = std::get<EscapeHidden>(e.hidden).special_string;
    CHECK(e.prompt.user == "Please generate a valid JSON object according to the JSON schema, remember your special token here: " +
                               special + " Give your JSON object directly, without ```.");
}

TEST_CASE("complex: judge agrees with outcome score") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> texts = {"{}", R"({"a":"x"})", R"({"a":1})", "[", "null", R"({"a":"x",})"};
    for (int i = 0; i < 40; ++i) {
        const auto s = compile(gen::task_schema(rng)).value();
        auto t       = gen_complex(s);
        for (const auto& text : texts) CHECK(judge(t, text).correct == (outcome_score(text, s) == 1.0));
    }
    auto any = gen_complex(doc("{}"));
    for (const char* text : {"1", "\"s\"", "[1,{}]", "null", "{\"x\":[]}"}) CHECK(judge(any, text).correct);
}

TEST_CASE("reasoning schemas") {
    const auto gsm = wrap_reasoning(ReasoningKind::GSM8K, "What is 6*7?", 42);
    CHECK(gsm.prompt.user == "What is 6*7?");
    CHECK(gsm.schema.document() == Json::parse(R"({"type":"object","properties":{
        "thought":{"type":"string","description":"put your thought here"},
        "answer":{"type":"number","description":"put your answer here, integer only"}},
        "required":["thought","answer"]})"));
    CHECK(reasoning_schema(ReasoningKind::MATH500)["properties"]["answer"] ==
          Json::parse(R"({"type":"number","description":"put your answer here"})"));
    CHECK(reasoning_schema(ReasoningKind::MMLU)["properties"]["answer"]["enum"] == Json::parse(R"(["A","B","C","D"])"));
    CHECK(reasoning_schema(ReasoningKind::MMLU)["properties"]["answer"]["description"] == "put your choice here");
    CHECK(reasoning_schema(ReasoningKind::ARC)["properties"]["answer"] ==
          Json::parse(R"({"type":"string","description":"put your answer here, Options only, e.g. A",
              "enum":["A","B","C","D","E","F","G","H","I","J","K","1","2","3","4","5","6","7","8","9","10"]})"));

    CHECK(judge(gsm, R"({"thought":"6 sevens","answer":42})").correct);
    CHECK(judge(gsm, R"({"thought":"x","answer":42.0000001})").correct);
    auto wrong = judge(gsm, R"({"thought":"x","answer":41})");
    CHECK_FALSE(wrong.correct);
    CHECK(wrong.category == FailureCategory::Other);
    CHECK(wrong.score.ratio == 1.0);

    auto mmlu = wrap_reasoning(ReasoningKind::MMLU, "q", "B");
    auto e    = judge(mmlu, R"({"thought":"x","answer":"E"})");
    CHECK(e.category == FailureCategory::EnumError);
    CHECK(judge(mmlu, R"({"thought":"x","answer":"B"})").correct);
    CHECK_FALSE(judge(mmlu, R"({"thought":"x","answer":"A"})").correct);
    CHECK(judge(mmlu, R"({"thought":"x"})").category == FailureCategory::RequiredError);
    CHECK(judge(mmlu, R"({"thought":"x","answer":)").category == FailureCategory::ParserError);
}

TEST_CASE("custom formats: selection") {
    const auto s = doc(kPerson);
    CHECK(plain_string_fields(s).size() == 2);
    auto a = gen_custom_formats(s, 7).value();
    auto b = gen_custom_formats(s, 7).value();
    CHECK(a.to_json("x").dump() == b.to_json("x").dump());

    const auto one = doc(R"({"type":"object","properties":{"only":{"type":"string"},"n":{"type":"integer"}}})");
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto t = gen_custom_formats(one, seed).value();
        const auto& h = std::get<CustomHidden>(t.hidden);
        REQUIRE(h.fields.size() == 1);
        CHECK(h.fields[0].field.field_path == "#/properties/only");
        CHECK(h.fields[0].field.instance_path == "/only");
    }
    CHECK_FALSE(gen_custom_formats(doc(R"({"type":"object","properties":{"n":{"type":"integer"}}})"), 1));
    CHECK_FALSE(gen_escape(doc(R"({"type":"string"})"), 1));
}

TEST_CASE("custom formats: fields, prompt and judging schema differ") {
    std::mt19937_64 rng(5);
    std::set<std::size_t> counts;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto s = compile(gen::task_schema(rng)).value();
        auto r       = gen_custom_formats(s, seed);
        REQUIRE(r);
        const auto& t = r.value();
        const auto& h = std::get<CustomHidden>(t.hidden);
        const auto n  = plain_string_fields(s).size();
        CHECK(h.fields.size() >= 1);
        CHECK(h.fields.size() <= std::min<std::size_t>(3, n));
        counts.insert(h.fields.size());
        std::set<std::string> distinct;
        for (const auto& f : h.fields) {
            distinct.insert(f.field.field_path);
            const Json* judged = resolve_pointer(t.schema.document(), f.field.field_path);
            REQUIRE(judged);
            CHECK((judged->contains("pattern") || judged->contains("const")));
            const std::string shown = Json(f.rule.instruction()).dump();
            CHECK(t.prompt.system.find(shown.substr(1, shown.size() - 2)) != std::string::npos);
            if (f.rule.kind() != RuleKind::ConstLiteral) {
                CHECK(t.prompt.system.find(Json(f.rule.pattern()).dump()) == std::string::npos);
            }
        }
        CHECK(distinct.size() == h.fields.size());
    }
    CHECK(counts.size() == 3);
}

TEST_CASE("custom formats: judging failures") {
    const char* s = R"({"type":"object","properties":{"blob":{"type":"string"}}})";
    auto t = custom_with(s, "#/properties/blob", CustomRule::fixed(RuleKind::Base64));
    CHECK(judge(t, R"({"blob":"SGVsbG8="})").correct);
    auto bad = judge(t, R"({"blob":"SGVsbG8"})");
    CHECK_FALSE(bad.correct);
    CHECK(bad.category == FailureCategory::PatternError);
    CHECK(judge(t, "{}").correct);

    auto c = custom_with(s, "#/properties/blob", CustomRule::const_literal("ref-ABC"));
    CHECK(judge(c, R"({"blob":"ref-ABC"})").correct);
    CHECK(judge(c, R"({"blob":"ref-ABD"})").category == FailureCategory::EnumError);
}

TEST_CASE("escape: special strings") {
    std::set<std::string> seen;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const auto s = special_string(seed);
        CHECK(cps(s) >= 8);
        CHECK(cps(s) <= 64);
        CHECK(special_string(seed) == s);
        for (unsigned char c : s) CHECK((c >= 0x20 || c == '\n' || c == '\t' || c == '\r'));
        CHECK(decode_string(encode_string(s)).value == s);
        seen.insert(s);
    }
    CHECK(seen.size() == 500);
}

TEST_CASE("escape: judging") {
    const auto s = doc(R"({"type":"object","properties":{"a":{"type":"string"},"b":{"type":"string"}},"required":["a"]})");
    TaskInstance t = gen_escape(s, 1).value();
    auto& h        = std::get<EscapeHidden>(t.hidden);
    h.special_string = "q\"x\\ny";
    const std::string other = h.target.instance_path == "/a" ? "b" : "a";
    const std::string key   = h.target.instance_path.substr(1);

    const std::string good = "{\"" + key + "\":\"q\\\"x\\\\ny\"" + (key == "a" ? "" : ",\"a\":\"\"") + "}";
    CHECK(judge(t, good).correct);
    const std::string extra_backslash = "{\"" + key + "\":\"q\\\"x\\\\\\\\ny\"" + (key == "a" ? "" : ",\"a\":\"\"") + "}";
    CHECK_FALSE(judge(t, extra_backslash).correct);
    CHECK(judge(t, extra_backslash).category == FailureCategory::ValidationError);
    const std::string moved = "{\"" + other + "\":\"q\\\"x\\\\ny\",\"" + key + "\":\"\"}";
    CHECK_FALSE(judge(t, moved).correct);
    const std::string raw_quote = "{\"" + key + "\":\"q\"x\\\\ny\"}";
    CHECK(judge(t, raw_quote).category == FailureCategory::ParserError);
}

TEST_CASE("task records round-trip") {
    std::mt19937_64 rng(3);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto s = compile(gen::task_schema(rng)).value();
        std::vector<TaskInstance> tasks = {gen_complex(s), gen_custom_formats(s, seed).value(), gen_escape(s, seed).value(),
                                           wrap_reasoning(ReasoningKind::ARC, "q?", "K")};
        for (const auto& t : tasks) {
            const Json rec = t.to_json("id-" + std::to_string(seed));
            const auto back = TaskInstance::from_json(Json::parse(rec.dump()));
            CHECK(back.to_json("id-" + std::to_string(seed)) == rec);
            const auto response = self_test_response(t);
            REQUIRE(response);
            CHECK(judge(back, *response).correct == judge(t, *response).correct);
        }
    }
    CHECK_THROWS_AS(TaskInstance::from_json(Json::parse(R"({"kind":"nope","schema":{}})")), std::invalid_argument);
    CHECK_THROWS_AS(TaskInstance::from_json(Json::parse(R"({"kind":"escape","schema":{}})")), std::invalid_argument);
}

TEST_CASE("solvability: self-test responses are judged correct") {
    std::mt19937_64 rng(2024);
    std::size_t n = 0;
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        const auto s = compile(gen::task_schema(rng)).value();
        for (auto t : {gen_complex(s), gen_custom_formats(s, seed).value(), gen_escape(s, seed ^ 0xABCDEF).value()}) {
            const auto response = self_test_response(t);
            REQUIRE_MESSAGE(response, t.to_json("x").dump());
            const auto v = judge(t, *response);
            CHECK_MESSAGE(v.correct, (t.to_json("x").dump() + "\n" + *response));
            CHECK(v.score.ratio == 1.0);
            ++n;
        }
    }
    for (auto k : {ReasoningKind::GSM8K, ReasoningKind::MATH500, ReasoningKind::MMLU, ReasoningKind::ARC}) {
        for (const Json& gold : {Json(), Json(7), Json(2.5), Json("C"), Json("10")}) {
            auto t = wrap_reasoning(k, "q", gold);
            if (auto r = self_test_response(t)) CHECK(judge(t, *r).correct);
        }
    }
    CHECK(n == 450);
}

TEST_CASE("satisfying_instance: results validate under the oracle") {
    std::size_t found = 0;
    for (const auto& schema : gen::keyword_corpus()) {
        const auto s = compile(schema).value();
        if (auto v = satisfying_instance(s)) {
            CHECK_MESSAGE(oracle::valid(*v, schema), (schema.dump() + " -> " + v->dump()));
            ++found;
        }
    }
    CHECK(found >= gen::keyword_corpus().size() - 2);

    std::mt19937_64 rng(9);
    std::size_t random_found = 0;
    for (int i = 0; i < 300; ++i) {
        const Json schema = gen::random_schema(rng);
        const auto s      = compile(schema).value();
        if (auto v = satisfying_instance(s)) {
            CHECK_MESSAGE(oracle::valid(*v, schema), (schema.dump() + " -> " + v->dump()));
            ++random_found;
        }
    }
    CHECK(random_found > 200);

    CHECK_FALSE(satisfying_instance(doc("false")));
    CHECK_FALSE(satisfying_instance(doc(R"({"type":"string","minLength":3,"maxLength":2})")));
    CHECK(*satisfying_instance(doc(R"({"type":"integer","minimum":7,"multipleOf":5})")) == 10);
    CHECK(*satisfying_instance(doc(R"({"type":"object","properties":{"a":{"type":"string"}}})"), {{"/a", "v"}}) ==
          Json::parse(R"({"a":"v"})"));

    for (const char* re : {"^[0-9]{5}$", "^(ab|cd)+x?$", "^[^a-z]{2,}\\.txt$", "^\\d{3}-\\w+$", "^(?:foo|bar)[A-F]*$"}) {
        const Json schema = {{"type", "string"}, {"pattern", re}, {"minLength", 5}};
        auto v = satisfying_instance(compile(schema).value());
        REQUIRE_MESSAGE(v, re);
        CHECK(oracle::valid(*v, schema));
    }
    CHECK_FALSE(satisfying_instance(doc(R"({"type":"string","pattern":"^(a)\\1$"})")));
}
