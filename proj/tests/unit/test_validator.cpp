#include <doctest.h>

#include <algorithm>
#include <random>

#include "jsonreward/custom_rules.hpp"
#include "jsonreward/validator.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace jsonreward;

namespace {

SchemaDoc schema_of(std::string_view text) {
    auto c = compile_text(text);
    REQUIRE_MESSAGE(c.ok(), (c.ok() ? "" : c.error().reason));
    return c.value();
}

JsonTree tree_of(std::string_view text) {
    auto r = parse(text, Dialect::Json);
    REQUIRE(r.ok());
    return r.tree();
}

}  // namespace

TEST_CASE("validate: basic violations") {
    auto s = schema_of(R"({"type":"object","properties":{"a":{"type":"integer"}},"required":["a"]})");
    CHECK(validate(tree_of(R"({"a":1})"), s).empty());

    auto bad = validate(tree_of(R"({"a":"x"})"), s);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0].instance_path == "/a");
    CHECK(bad[0].keyword == "type");
    CHECK(bad[0].category == FailureCategory::TypeError);
    CHECK(bad[0].schema_path == "/properties/a/type");

    auto missing = validate(tree_of("{}"), s);
    REQUIRE(missing.size() == 1);
    CHECK(missing[0].instance_path == "");
    CHECK(missing[0].keyword == "required");
    CHECK(missing[0].category == FailureCategory::RequiredError);
}

TEST_CASE("validate: sibling keywords are all evaluated") {
    auto s = schema_of(R"({"type":"integer","minimum":5,"enum":[10,20]})");
    auto r = validate(tree_of("2.5"), s);
    std::vector<std::string> kws;
    for (const auto& v : r) kws.push_back(v.keyword);
    std::sort(kws.begin(), kws.end());
    CHECK(kws == std::vector<std::string>{"enum", "minimum", "type"});
}

TEST_CASE("validate: composition and annotations") {
    auto one = schema_of(R"({"oneOf":[{"type":"number"},{"type":"integer"}]})");
    auto r   = validate(tree_of("3"), one);
    REQUIRE(r.size() == 1);
    CHECK(r[0].category == FailureCategory::CompositionError);
    CHECK(validate(tree_of("3.5"), one).empty());

    auto ann = schema_of(R"({"title":"t","description":"d","default":5,"format":"email","x-y":1})");
    CHECK(validate(tree_of(R"("not an email")"), ann).empty());

    ValidateOptions opts;
    opts.format_hooks["email"] = [](std::string_view v) { return v.find('@') != std::string_view::npos; };
    auto f = validate(tree_of(R"("nope")"), ann, opts);
    REQUIRE(f.size() == 1);
    CHECK(f[0].category == FailureCategory::FormatError);
}

TEST_CASE("validate: additionalProperties false charges the extra member") {
    auto s = schema_of(R"({"properties":{"a":{}},"additionalProperties":false})");
    auto r = validate(tree_of(R"({"a":1,"b":2})"), s);
    REQUIRE(r.size() == 1);
    CHECK(r[0].instance_path == "/b");
    CHECK(r[0].keyword == "additionalProperties");
}

TEST_CASE("validate: exact numbers") {
    CHECK(validate(tree_of("1.0"), schema_of(R"({"type":"integer"})")).empty());
    CHECK(validate(tree_of("1e2"), schema_of(R"({"const":100})")).empty());
    CHECK_FALSE(validate(tree_of("0.30000000000000004"), schema_of(R"({"enum":[0.3]})")).empty());
    CHECK(validate(tree_of("0.3"), schema_of(R"({"multipleOf":0.1})")).empty());
    CHECK(validate(tree_of("1e300"), schema_of(R"({"multipleOf":7})")).size() == 1);
    CHECK(validate(tree_of("7e300"), schema_of(R"({"multipleOf":7})")).empty());
    CHECK(validate(tree_of("12345678901234567890"), schema_of(R"({"multipleOf":10})")).empty());
}

TEST_CASE("validate: recursion terminates") {
    auto s = schema_of(R"({"$defs":{"n":{"type":"object","properties":{"next":{"$ref":"#/$defs/n"}}}},"$ref":"#/$defs/n"})");
    CHECK(validate(tree_of(R"({"next":{"next":{"next":{}}}})"), s).empty());
    auto r = validate(tree_of(R"({"next":{"next":5}})"), s);
    REQUIRE(r.size() == 1);
    CHECK(r[0].instance_path == "/next/next");
    auto loop = schema_of(R"({"$ref":"#"})");
    CHECK(validate(tree_of("1"), loop).empty());
}

TEST_CASE("classify: document order and precedence") {
    auto s = schema_of(R"({"properties":{"a":{"type":"integer"},"b":{"pattern":"^x"}}})");
    auto r = validate(tree_of(R"({"a":"s","b":"y"})"), s);
    REQUIRE(r.size() == 2);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(r.begin(), r.end(), rng);
        CHECK(classify(r) == FailureCategory::TypeError);
    }
    auto e = validate(tree_of(R"("E")"), schema_of(R"({"enum":["A","B"]})"));
    CHECK(classify(e) == FailureCategory::EnumError);
    auto len = validate(tree_of(R"("")"), schema_of(R"({"minLength":1})"));
    CHECK(classify(len) == FailureCategory::ValidationError);
    CHECK_THROWS_AS(classify(ValidationReport{}), std::invalid_argument);
    auto pf = parse("{", Dialect::Json);
    CHECK(classify(pf.failure()) == FailureCategory::ParserError);
}

TEST_CASE("validator agrees with the reference validator on the instance grid") {
    const auto grid   = gen::instance_grid();
    const auto corpus = gen::keyword_corpus();
    std::vector<JsonTree> trees;
    for (const auto& v : grid) trees.push_back(tree_of(to_text(v)));
    std::size_t pairs = 0;
    for (const auto& schema_json : corpus) {
        auto s = compile(schema_json).value();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const bool ours = validate(trees[i], s).empty();
            INFO(schema_json.dump(), " ", grid[i].dump());
            REQUIRE(ours == oracle::valid(grid[i], schema_json));
            REQUIRE(ours == is_valid(trees[i], s));
            ++pairs;
        }
    }
    MESSAGE(pairs << " pairs");
}

TEST_CASE("monotone composition: deleting a constraint keeps valid instances valid") {
    std::mt19937_64 rng(17);
    const char* constraint_keywords[] = {"type", "minLength", "maxLength", "pattern", "enum", "const", "minimum",
                                         "maximum", "exclusiveMinimum", "multipleOf", "required", "minItems",
                                         "maxItems", "uniqueItems", "additionalProperties"};
    for (int round = 0; round < 300; ++round) {
        Json schema = gen::random_schema(rng, 2);
        for (int attempt = 0; attempt < 10; ++attempt) {
            Json instance = gen::random_value(rng, 2);
            auto tree     = tree_of(to_text(instance));
            auto s        = compile(schema).value();
            if (!validate(tree, s).empty()) continue;
            for (const char* kw : constraint_keywords) {
                if (!schema.contains(kw)) continue;
                Json weaker = schema;
                weaker.erase(kw);
                CHECK(validate(tree, compile(weaker).value()).empty());
            }
        }
    }
}

TEST_CASE("custom rules: table checkers") {
    CHECK(check_custom("SGVsbG8=", CustomRule::fixed(RuleKind::Base64)));
    CHECK_FALSE(check_custom("SGVsbG8", CustomRule::fixed(RuleKind::Base64)));
    CHECK(check_custom("#0aF3c9", CustomRule::fixed(RuleKind::RgbColor)));
    CHECK_FALSE(check_custom("#0aF3c", CustomRule::fixed(RuleKind::RgbColor)));
    CHECK(check_custom("+1 (555) 010-2030", CustomRule::fixed(RuleKind::Phone)));
    CHECK_FALSE(check_custom("555", CustomRule::fixed(RuleKind::Phone)));
    CHECK(check_custom("/usr/local/bin", CustomRule::fixed(RuleKind::LinuxPath)));
    CHECK(check_custom("/", CustomRule::fixed(RuleKind::LinuxPath)));
    CHECK_FALSE(check_custom("usr/bin", CustomRule::fixed(RuleKind::LinuxPath)));
    CHECK_FALSE(check_custom("//x", CustomRule::fixed(RuleKind::LinuxPath)));
    CHECK(check_custom("C:\\Users\\data", CustomRule::fixed(RuleKind::WindowsPath)));
    CHECK_FALSE(check_custom("C:/Users", CustomRule::fixed(RuleKind::WindowsPath)));
    CHECK(check_custom("Tr0ub4dor&3", CustomRule::fixed(RuleKind::StrongPassword)));
    CHECK_FALSE(check_custom("password1", CustomRule::fixed(RuleKind::StrongPassword)));
    CHECK(check_custom("v2", CustomRule::const_literal("v2")));
    CHECK_FALSE(check_custom("v3", CustomRule::const_literal("v2")));
    for (RuleKind k : kAllRuleKinds) {
        if (k == RuleKind::ConstLiteral || k == RuleKind::RegexPattern) continue;
        auto r = CustomRule::fixed(k);
        CHECK(r.check(r.example()));
        CHECK(CustomRule::from_json(r.to_json()).pattern() == r.pattern());
    }
    for (const auto& t : regex_templates()) CHECK(CustomRule::regex_pattern(t.pattern, t.example).check(t.example));
}

TEST_CASE("base64 pattern equals the quartet rule on short strings") {
    // Reduced alphabet: one representative of each character class.
    const std::string alphabet = "Aa0+/=";
    auto rule                  = CustomRule::fixed(RuleKind::Base64);
    std::vector<std::string> frontier{""};
    std::size_t checked = 0;
    for (int len = 0; len <= 8; ++len) {
        std::vector<std::string> next;
        for (const auto& s : frontier) {
            REQUIRE_MESSAGE(rule.check(s) == oracle::is_base64(s), s);
            ++checked;
            if (len < 8) {
                for (char c : alphabet) next.push_back(s + c);
            }
        }
        frontier = std::move(next);
    }
    CHECK(checked > 2'000'000);
}

TEST_CASE("inject_rule") {
    auto s = schema_of(R"({"type":"object","properties":{"data":{"type":"string"},"version":{"type":"string","description":"Version."},"n":{"type":"integer"}}})");
    auto b = inject_rule(s, "/properties/data", CustomRule::fixed(RuleKind::Base64));
    REQUIRE(b.ok());
    const Json& data = b->document()["properties"]["data"];
    CHECK(data["pattern"] == "^(?:[A-Za-z0-9+/]{4})*(?:[A-Za-z0-9+/]{2}==|[A-Za-z0-9+/]{3}=)?$");
    CHECK(data["description"] == CustomRule::fixed(RuleKind::Base64).instruction());
    CHECK_FALSE(s.document()["properties"]["data"].contains("pattern"));

    auto c = inject_rule(s, "/properties/version", CustomRule::const_literal("v2"));
    REQUIRE(c.ok());
    CHECK(c->document()["properties"]["version"]["const"] == "v2");
    CHECK(c->document()["properties"]["version"]["description"] ==
          "Version. The value must be exactly the string \"v2\".");

    CHECK_FALSE(inject_rule(s, "/properties/missing", CustomRule::const_literal("x")).ok());
    CHECK_FALSE(inject_rule(s, "/properties/n", CustomRule::const_literal("x")).ok());

    auto prompt = inject_rule(s.document(), "/properties/data", CustomRule::fixed(RuleKind::Base64),
                              InjectMode::DescriptionOnly);
    REQUIRE(prompt.ok());
    CHECK_FALSE(prompt.value()["properties"]["data"].contains("pattern"));
    CHECK(prompt.value()["properties"]["data"].contains("description"));
}
