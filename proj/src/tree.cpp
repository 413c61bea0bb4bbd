#include "jsonreward/tree.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

namespace jsonreward {

std::string_view to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::Object: return "object";
        case ValueKind::Array: return "array";
        case ValueKind::String: return "string";
        case ValueKind::Number: return "number";
        case ValueKind::Boolean: return "boolean";
        case ValueKind::Null: return "null";
    }
    return "?";
}

JsonTree::JsonTree(std::string source, TokenStream tokens, std::vector<JsonNode> nodes, Dialect dialect)
    : source_(std::move(source)), tokens_(std::move(tokens)), nodes_(std::move(nodes)), dialect_(dialect) {}

std::optional<NodeId> JsonTree::member(NodeId object, std::string_view key) const {
    const auto& n = nodes_[object];
    if (n.kind != ValueKind::Object) return std::nullopt;
    for (std::size_t i = n.keys.size(); i-- > 0;) {
        if (n.keys[i] == key) return n.children[i];
    }
    return std::nullopt;
}

std::optional<NodeId> JsonTree::find(std::string_view pointer) const {
    if (nodes_.empty()) return std::nullopt;
    NodeId at = root();
    for (const auto& token : split_pointer(pointer)) {
        const auto& n = nodes_[at];
        if (n.kind == ValueKind::Object) {
            auto next = member(at, token);
            if (!next) return std::nullopt;
            at = *next;
        } else if (n.kind == ValueKind::Array) {
            if (token.empty() || (token.size() > 1 && token[0] == '0')) return std::nullopt;
            std::size_t index = 0;
            auto [ptr, ec]    = std::from_chars(token.data(), token.data() + token.size(), index);
            if (ec != std::errc() || ptr != token.data() + token.size() || index >= n.children.size()) {
                return std::nullopt;
            }
            at = n.children[index];
        } else {
            return std::nullopt;
        }
    }
    return at;
}

std::vector<Token> JsonTree::trivia() const {
    std::vector<Token> out;
    for (const auto& t : tokens_.tokens) {
        if (t.kind == TokenKind::Comment) out.push_back(t);
    }
    return out;
}

namespace {

bool is_json_integer_text(std::string_view text) {
    std::size_t i = text.starts_with('-') ? 1 : 0;
    if (i == text.size()) return false;
    return std::all_of(text.begin() + static_cast<std::ptrdiff_t>(i), text.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
}

bool is_json_number_text(std::string_view text) {
    auto ts = lex(text, Dialect::Json);
    return ts.tokens.size() == 1 && ts.tokens[0].kind == TokenKind::Number && ts.tokens[0].complete &&
           ts.tokens[0].span == Span{0, text.size()};
}

}  // namespace

Json JsonTree::to_json(NodeId id) const {
    const auto& n = nodes_[id];
    switch (n.kind) {
        case ValueKind::Object: {
            Json out = Json::object();
            for (std::size_t i = 0; i < n.children.size(); ++i) out[n.keys[i]] = to_json(n.children[i]);
            return out;
        }
        case ValueKind::Array: {
            Json out = Json::array();
            for (auto c : n.children) out.push_back(to_json(c));
            return out;
        }
        case ValueKind::String: return n.string_value;
        case ValueKind::Number: {
            if (is_json_integer_text(n.number_text)) {
                std::int64_t v;
                auto [p, ec] = std::from_chars(n.number_text.data(), n.number_text.data() + n.number_text.size(), v);
                if (ec == std::errc() && p == n.number_text.data() + n.number_text.size()) return v;
                std::uint64_t u;
                auto [p2, ec2] = std::from_chars(n.number_text.data(), n.number_text.data() + n.number_text.size(), u);
                if (ec2 == std::errc() && p2 == n.number_text.data() + n.number_text.size()) return u;
            }
            return n.number_value;
        }
        case ValueKind::Boolean: return n.bool_value;
        case ValueKind::Null: return nullptr;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

bool accepts_value(Expect e) {
    return e == Expect::Value || e == Expect::MemberValue || e == Expect::ElementOrEnd || e == Expect::Element;
}

bool is_value_token(const Token& t) {
    switch (t.kind) {
        case TokenKind::LBrace:
        case TokenKind::LBracket:
        case TokenKind::Number:
        case TokenKind::True:
        case TokenKind::False:
        case TokenKind::Null:
            return true;
        case TokenKind::String:
            return !t.bare;
        default:
            return false;
    }
}

class Parser {
   public:
    Parser(std::string_view text, Dialect dialect) : text_(text), dialect_(dialect), ts_(lex(text, dialect)) {}

    ParseResult run() {
        const auto& toks = ts_.tokens;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (t.kind == TokenKind::Comment) {
                if (t.complete) continue;
                return fail(t.span.end, i + 1, true, false, "unterminated comment");
            }
            if (t.kind == TokenKind::Error) return fail(t.span.begin, i, false, false, "unexpected character");
            if (accepts_value(expect_)) {
                const bool closes = t.kind == TokenKind::RBracket &&
                                    (expect_ == Expect::ElementOrEnd || (expect_ == Expect::Element && json5()));
                if (closes) {
                    close(i);
                    continue;
                }
                if (!is_value_token(t)) return fail(t.span.begin, i, false, false, "expected a value");
                if (!t.complete) {
                    return fail(t.span.end, i + 1, true, t.kind == TokenKind::String, "incomplete value");
                }
                if ((t.kind == TokenKind::LBrace || t.kind == TokenKind::LBracket) && stack_.size() >= kMaxNesting) {
                    return fail(t.span.begin, i, false, false, "nesting too deep");
                }
                open_value(i, t);
                continue;
            }
            switch (expect_) {
                case Expect::KeyOrEnd:
                case Expect::Key: {
                    if (t.kind == TokenKind::RBrace && (expect_ == Expect::KeyOrEnd || json5())) {
                        close(i);
                        continue;
                    }
                    const bool key = t.kind == TokenKind::String || (json5() && t.bare);
                    if (!key) return fail(t.span.begin, i, false, false, "expected a key");
                    if (!t.complete) {
                        return fail(t.span.end, i + 1, true, t.kind == TokenKind::String && !t.bare, "incomplete key");
                    }
                    stack_.back().key = t.decoded;
                    expect_           = Expect::Colon;
                    continue;
                }
                case Expect::Colon:
                    if (t.kind != TokenKind::Colon) return fail(t.span.begin, i, false, false, "expected ':'");
                    expect_ = Expect::MemberValue;
                    continue;
                case Expect::ObjectNext:
                    if (t.kind == TokenKind::Comma) {
                        expect_ = Expect::Key;
                    } else if (t.kind == TokenKind::RBrace) {
                        close(i);
                    } else {
                        return fail(t.span.begin, i, false, false, "expected ',' or '}'");
                    }
                    continue;
                case Expect::ArrayNext:
                    if (t.kind == TokenKind::Comma) {
                        expect_ = Expect::Element;
                    } else if (t.kind == TokenKind::RBracket) {
                        close(i);
                    } else {
                        return fail(t.span.begin, i, false, false, "expected ',' or ']'");
                    }
                    continue;
                default:
                    return fail(t.span.begin, i, false, false, "unexpected content after the document");
            }
        }
        if (expect_ != Expect::End) {
            return fail(text_.size(), toks.size(), false, false, "unexpected end of input");
        }
        return JsonTree(std::string(text_), std::move(ts_), std::move(nodes_), dialect_);
    }

   private:
    struct Frame {
        NodeId node;
        bool object;
        std::string key;
    };

    bool json5() const { return dialect_ == Dialect::Json5; }

    Expect after_value() const {
        if (stack_.empty()) return Expect::End;
        return stack_.back().object ? Expect::ObjectNext : Expect::ArrayNext;
    }

    void open_value(std::size_t index, const Token& t) {
        const NodeId id = nodes_.size();
        JsonNode n;
        n.first_token = index;
        n.last_token  = index;
        if (!stack_.empty()) {
            auto& frame  = stack_.back();
            auto& parent = nodes_[frame.node];
            n.parent     = frame.node;
            if (frame.object) {
                n.pointer = parent.pointer + "/" + escape_pointer_token(frame.key);
                parent.keys.push_back(frame.key);
            } else {
                n.pointer = parent.pointer + "/" + std::to_string(parent.children.size());
            }
            parent.children.push_back(id);
        }
        switch (t.kind) {
            case TokenKind::LBrace: n.kind = ValueKind::Object; break;
            case TokenKind::LBracket: n.kind = ValueKind::Array; break;
            case TokenKind::String:
                n.kind         = ValueKind::String;
                n.string_value = t.decoded;
                break;
            case TokenKind::Number:
                n.kind         = ValueKind::Number;
                n.number_text  = std::string(text_.substr(t.span.begin, t.span.size()));
                n.number_value = t.number;
                break;
            case TokenKind::True:
            case TokenKind::False:
                n.kind       = ValueKind::Boolean;
                n.bool_value = t.kind == TokenKind::True;
                break;
            default: n.kind = ValueKind::Null; break;
        }
        nodes_.push_back(std::move(n));
        if (t.kind == TokenKind::LBrace || t.kind == TokenKind::LBracket) {
            stack_.push_back({id, t.kind == TokenKind::LBrace, {}});
            expect_ = t.kind == TokenKind::LBrace ? Expect::KeyOrEnd : Expect::ElementOrEnd;
        } else {
            expect_ = after_value();
        }
    }

    void close(std::size_t index) {
        nodes_[stack_.back().node].last_token = index;
        stack_.pop_back();
        expect_ = after_value();
    }

    ParseResult fail(std::size_t offset, std::size_t consumed, bool partial, bool open_string, std::string message) {
        ParseFailure f;
        f.error_offset = offset;
        for (const auto& frame : stack_) f.open_stack.push_back(frame.object ? Construct::Object : Construct::Array);
        if (open_string) f.open_stack.push_back(Construct::String);
        f.partial_tokens.assign(ts_.tokens.begin(), ts_.tokens.begin() + static_cast<std::ptrdiff_t>(consumed));
        f.pending      = expect_;
        f.partial_last = partial;
        f.dialect      = dialect_;
        f.message      = std::move(message);
        return f;
    }

    std::string_view text_;
    Dialect dialect_;
    TokenStream ts_;
    std::vector<JsonNode> nodes_;
    std::vector<Frame> stack_;
    Expect expect_ = Expect::Value;
};

}  // namespace

ParseResult parse(std::string_view text, Dialect dialect) { return Parser(text, dialect).run(); }

// ---------------------------------------------------------------------------
// Repair

RepairResult repair(std::string_view text, const ParseFailure& failure) {
    const auto& toks = failure.partial_tokens;
    std::size_t k    = toks.size();
    Expect state     = failure.pending;
    std::vector<Construct> containers;
    for (auto c : failure.open_stack) {
        if (c != Construct::String) containers.push_back(c);
    }
    auto after_value = [&] {
        if (containers.empty()) return Expect::End;
        return containers.back() == Construct::Object ? Expect::ObjectNext : Expect::ArrayNext;
    };

    std::string closers;
    std::size_t padded = 0;
    std::size_t cut    = 0;
    bool string_closed = false;
    if (failure.partial_last && k > 0) {
        const Token& t = toks[k - 1];
        if (t.kind == TokenKind::String && !t.bare && accepts_value(state)) {
            cut = scan_string(text, t.span.begin, failure.dialect).safe_end;
            closers.push_back(t.quote);
            ++padded;
            state         = after_value();
            string_closed = true;
        } else {
            --k;
        }
    }
    if (!string_closed) {
        auto drop_back = [&] {
            while (k > 0 && toks[k - 1].kind == TokenKind::Comment) --k;
            if (k > 0) --k;
        };
        const bool strict = failure.dialect == Dialect::Json;
        // A key dropped after ',' leaves the comma dangling in strict JSON.
        auto drop_comma = [&] {
            std::size_t j = k;
            while (j > 0 && toks[j - 1].kind == TokenKind::Comment) --j;
            if (strict && j > 0 && toks[j - 1].kind == TokenKind::Comma) {
                k = j - 1;
                ++padded;
            }
        };
        switch (state) {
            case Expect::Colon:
                drop_back();
                ++padded;
                drop_comma();
                break;
            case Expect::MemberValue:
                drop_back();
                drop_back();
                ++padded;
                drop_comma();
                break;
            case Expect::Key:
            case Expect::Element:
                if (strict) {
                    drop_back();
                    ++padded;
                }
                break;
            case Expect::Value:
                return {"null", 1, 0};
            default:
                break;
        }
        cut = k == 0 ? 0 : toks[k - 1].span.end;
    }
    for (auto it = containers.rbegin(); it != containers.rend(); ++it) {
        closers.push_back(*it == Construct::Object ? '}' : ']');
        ++padded;
    }
    std::string repaired(text.substr(0, cut));
    repaired += closers;
    return {std::move(repaired), padded, k};
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void serialize_into(const JsonTree& tree, NodeId id, std::string& out) {
    const auto& n = tree.node(id);
    switch (n.kind) {
        case ValueKind::Object:
            out.push_back('{');
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i) out.push_back(',');
                out += encode_string(n.keys[i]);
                out.push_back(':');
                serialize_into(tree, n.children[i], out);
            }
            out.push_back('}');
            break;
        case ValueKind::Array:
            out.push_back('[');
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i) out.push_back(',');
                serialize_into(tree, n.children[i], out);
            }
            out.push_back(']');
            break;
        case ValueKind::String: out += encode_string(n.string_value); break;
        case ValueKind::Number:
            if (is_json_number_text(n.number_text)) {
                out += n.number_text;
            } else if (std::isfinite(n.number_value)) {
                out += Json(n.number_value).dump();
            } else {
                out += "null";
            }
            break;
        case ValueKind::Boolean: out += n.bool_value ? "true" : "false"; break;
        case ValueKind::Null: out += "null"; break;
    }
}

void to_text_into(const Json& v, std::string& out) {
    if (v.is_object()) {
        out.push_back('{');
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out.push_back(',');
            first = false;
            out += encode_string(it.key());
            out.push_back(':');
            to_text_into(it.value(), out);
        }
        out.push_back('}');
    } else if (v.is_array()) {
        out.push_back('[');
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out.push_back(',');
            to_text_into(v[i], out);
        }
        out.push_back(']');
    } else if (v.is_string()) {
        out += encode_string(v.get_ref<const std::string&>());
    } else {
        out += v.dump();
    }
}

}  // namespace

std::string serialize(const JsonTree& tree, NodeId id) {
    std::string out;
    serialize_into(tree, id, out);
    return out;
}

std::string to_text(const Json& value) {
    std::string out;
    to_text_into(value, out);
    return out;
}

// ---------------------------------------------------------------------------
// Pointers

std::string escape_pointer_token(std::string_view token) {
    std::string out;
    out.reserve(token.size());
    for (char c : token) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string unescape_pointer_token(std::string_view token) {
    std::string out;
    out.reserve(token.size());
    for (std::size_t i = 0; i < token.size(); ++i) {
        if (token[i] == '~' && i + 1 < token.size() && (token[i + 1] == '0' || token[i + 1] == '1')) {
            out.push_back(token[i + 1] == '0' ? '~' : '/');
            ++i;
        } else {
            out.push_back(token[i]);
        }
    }
    return out;
}

std::vector<std::string> split_pointer(std::string_view pointer) {
    std::vector<std::string> out;
    if (pointer.empty()) return out;
    std::size_t start = pointer.front() == '/' ? 1 : 0;
    while (true) {
        const auto slash = pointer.find('/', start);
        out.push_back(unescape_pointer_token(pointer.substr(start, slash == std::string_view::npos ? slash : slash - start)));
        if (slash == std::string_view::npos) break;
        start = slash + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact decimals and equality

namespace {

void multiply_add(std::string& decimal, unsigned factor, unsigned add) {
    unsigned carry = add;
    for (auto it = decimal.rbegin(); it != decimal.rend(); ++it) {
        const unsigned v = static_cast<unsigned>(*it - '0') * factor + carry;
        *it              = static_cast<char>('0' + v % 10);
        carry            = v / 10;
    }
    while (carry) {
        decimal.insert(decimal.begin(), static_cast<char>('0' + carry % 10));
        carry /= 10;
    }
}

void normalize(Decimal& d) {
    const auto first = d.digits.find_first_not_of('0');
    if (first == std::string::npos) {
        d.digits.clear();
        d.exponent = 0;
        d.negative = false;
        return;
    }
    d.digits.erase(0, first);
    while (!d.digits.empty() && d.digits.back() == '0') {
        d.digits.pop_back();
        ++d.exponent;
    }
}

}  // namespace

Decimal to_decimal(std::string_view text) {
    Decimal d;
    std::size_t i = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        d.negative = text[i] == '-';
        ++i;
    }
    const auto rest = text.substr(i);
    if (rest == "Infinity") {
        d.special = d.negative ? Decimal::Special::NegInf : Decimal::Special::PosInf;
        return d;
    }
    if (rest == "NaN") {
        d.special  = Decimal::Special::NaN;
        d.negative = false;
        return d;
    }
    if (rest.size() > 2 && rest[0] == '0' && (rest[1] == 'x' || rest[1] == 'X')) {
        d.digits = "0";
        for (char c : rest.substr(2)) {
            const unsigned v = (c >= '0' && c <= '9') ? static_cast<unsigned>(c - '0')
                               : (c >= 'a' && c <= 'f') ? static_cast<unsigned>(c - 'a' + 10)
                                                        : static_cast<unsigned>(c - 'A' + 10);
            multiply_add(d.digits, 16, v);
        }
        normalize(d);
        return d;
    }
    std::size_t frac_len = 0;
    bool in_frac         = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.') {
            in_frac = true;
        } else if (c == 'e' || c == 'E') {
            ++i;
            break;
        } else {
            d.digits.push_back(c);
            if (in_frac) ++frac_len;
        }
    }
    long long exp = 0;
    bool exp_neg  = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        exp_neg = text[i] == '-';
        ++i;
    }
    constexpr long long kCap = 1'000'000'000'000LL;
    for (; i < text.size(); ++i) exp = std::min(kCap, exp * 10 + (text[i] - '0'));
    d.exponent = (exp_neg ? -exp : exp) - static_cast<long long>(frac_len);
    normalize(d);
    return d;
}

Decimal json_decimal(const Json& number) {
    if (number.is_number_integer()) return to_decimal(std::string_view(number.dump()));
    const double v = number.get<double>();
    if (std::isnan(v)) return to_decimal(std::string_view("NaN"));
    if (std::isinf(v)) return to_decimal(std::string_view(v > 0 ? "Infinity" : "-Infinity"));
    return to_decimal(std::string_view(number.dump()));
}

namespace {

std::map<std::string, NodeId> member_map(const JsonTree& t, NodeId id) {
    std::map<std::string, NodeId> out;
    const auto& n = t.node(id);
    for (std::size_t i = 0; i < n.children.size(); ++i) out[n.keys[i]] = n.children[i];
    return out;
}

}  // namespace

bool equal(const JsonTree& tree, NodeId id, const Json& value) {
    const auto& n = tree.node(id);
    switch (n.kind) {
        case ValueKind::Object: {
            if (!value.is_object()) return false;
            const auto members = member_map(tree, id);
            if (members.size() != value.size()) return false;
            for (auto it = value.begin(); it != value.end(); ++it) {
                auto m = members.find(it.key());
                if (m == members.end() || !equal(tree, m->second, it.value())) return false;
            }
            return true;
        }
        case ValueKind::Array:
            if (!value.is_array() || value.size() != n.children.size()) return false;
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (!equal(tree, n.children[i], value[i])) return false;
            }
            return true;
        case ValueKind::String: return value.is_string() && value.get_ref<const std::string&>() == n.string_value;
        case ValueKind::Number: return value.is_number() && to_decimal(n.number_text) == json_decimal(value);
        case ValueKind::Boolean: return value.is_boolean() && value.get<bool>() == n.bool_value;
        case ValueKind::Null: return value.is_null();
    }
    return false;
}

bool equal(const JsonTree& a, NodeId x, const JsonTree& b, NodeId y) {
    const auto& m = a.node(x);
    const auto& n = b.node(y);
    if (m.kind != n.kind) return false;
    switch (m.kind) {
        case ValueKind::Object: {
            const auto lhs = member_map(a, x);
            const auto rhs = member_map(b, y);
            if (lhs.size() != rhs.size()) return false;
            for (const auto& [key, child] : lhs) {
                auto it = rhs.find(key);
                if (it == rhs.end() || !equal(a, child, b, it->second)) return false;
            }
            return true;
        }
        case ValueKind::Array:
            if (m.children.size() != n.children.size()) return false;
            for (std::size_t i = 0; i < m.children.size(); ++i) {
                if (!equal(a, m.children[i], b, n.children[i])) return false;
            }
            return true;
        case ValueKind::String: return m.string_value == n.string_value;
        case ValueKind::Number: return to_decimal(m.number_text) == to_decimal(n.number_text);
        case ValueKind::Boolean: return m.bool_value == n.bool_value;
        case ValueKind::Null: return true;
    }
    return false;
}

bool equal(const Json& a, const Json& b) {
    if (a.is_number() && b.is_number()) return json_decimal(a) == json_decimal(b);
    if (a.type() != b.type()) return false;
    if (a.is_object()) {
        if (a.size() != b.size()) return false;
        for (auto it = a.begin(); it != a.end(); ++it) {
            auto other = b.find(it.key());
            if (other == b.end() || !equal(it.value(), *other)) return false;
        }
        return true;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!equal(a[i], b[i])) return false;
        }
        return true;
    }
    return a == b;
}

}  // namespace jsonreward
