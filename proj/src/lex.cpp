#include "jsonreward/lex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace jsonreward {

std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::LBrace: return "LBRACE";
        case TokenKind::RBrace: return "RBRACE";
        case TokenKind::LBracket: return "LBRACKET";
        case TokenKind::RBracket: return "RBRACKET";
        case TokenKind::Colon: return "COLON";
        case TokenKind::Comma: return "COMMA";
        case TokenKind::String: return "STRING";
        case TokenKind::Number: return "NUMBER";
        case TokenKind::True: return "TRUE";
        case TokenKind::False: return "FALSE";
        case TokenKind::Null: return "NULL";
        case TokenKind::Comment: return "COMMENT";
        case TokenKind::Error: return "ERROR";
    }
    return "?";
}

std::string_view to_string(DecodeError error) {
    switch (error) {
        case DecodeError::None: return "none";
        case DecodeError::NotQuoted: return "not_quoted";
        case DecodeError::Unterminated: return "unterminated";
        case DecodeError::InvalidEscape: return "invalid_escape";
        case DecodeError::LoneSurrogate: return "lone_surrogate";
        case DecodeError::ControlCharacter: return "control_character";
        case DecodeError::InvalidUtf8: return "invalid_utf8";
        case DecodeError::TrailingCharacters: return "trailing_characters";
    }
    return "?";
}

namespace utf8 {

std::size_t decode(std::string_view text, std::size_t pos, char32_t& out) {
    const auto n  = text.size();
    const auto b0 = static_cast<unsigned char>(text[pos]);
    if (b0 < 0x80) {
        out = b0;
        return 1;
    }
    std::size_t len;
    char32_t cp;
    char32_t min;
    if (b0 >= 0xC2 && b0 <= 0xDF) {
        len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if (b0 >= 0xE0 && b0 <= 0xEF) {
        len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if (b0 >= 0xF0 && b0 <= 0xF4) {
        len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
        return 0;
    }
    if (pos + len > n) return 0;
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(text[pos + i]);
        if ((b & 0xC0) != 0x80) return 0;
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
    out = cp;
    return len;
}

bool is_truncated_sequence(std::string_view text, std::size_t pos) {
    const auto n  = text.size();
    const auto b0 = static_cast<unsigned char>(text[pos]);
    std::size_t len;
    if (b0 >= 0xC2 && b0 <= 0xDF) {
        len = 2;
    } else if (b0 >= 0xE0 && b0 <= 0xEF) {
        len = 3;
    } else if (b0 >= 0xF0 && b0 <= 0xF4) {
        len = 4;
    } else {
        return false;
    }
    if (pos + len <= n) return false;
    for (std::size_t i = pos + 1; i < n; ++i) {
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) return false;
    }
    // Reject prefixes that can only lead to overlong or surrogate encodings.
    if (n - pos >= 2) {
        const auto b1 = static_cast<unsigned char>(text[pos + 1]);
        if (b0 == 0xE0 && b1 < 0xA0) return false;
        if (b0 == 0xED && b1 > 0x9F) return false;
        if (b0 == 0xF0 && b1 < 0x90) return false;
        if (b0 == 0xF4 && b1 > 0x8F) return false;
    }
    return true;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::size_t length(std::string_view text) {
    std::size_t count = 0;
    for (std::size_t p = 0; p < text.size();) {
        char32_t cp;
        const auto len = decode(text, p, cp);
        p += len == 0 ? 1 : len;
        ++count;
    }
    return count;
}

}  // namespace utf8

namespace {

bool is_hex(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

unsigned hex_value(char c) {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    return static_cast<unsigned>(c - 'A' + 10);
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_json5_space(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0xA0: case 0xFEFF: case 0x2028: case 0x2029: case 0x1680:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_line_terminator(char32_t cp) { return cp == 0x0A || cp == 0x0D || cp == 0x2028 || cp == 0x2029; }

// Reads `count` hex digits at `pos`. On failure sets `bad` to the first
// offending offset (text.size() when the input ends first).
bool read_hex(std::string_view text, std::size_t pos, int count, unsigned& value, std::size_t& bad) {
    value = 0;
    for (int i = 0; i < count; ++i) {
        const auto q = pos + static_cast<std::size_t>(i);
        if (q >= text.size() || !is_hex(text[q])) {
            bad = q >= text.size() ? text.size() : q;
            return false;
        }
        value = value * 16 + hex_value(text[q]);
    }
    return true;
}

StringScan fail(StringScan s, std::size_t end, DecodeError error) {
    s.end      = end;
    s.complete = false;
    s.error    = error;
    return s;
}

bool is_ident_start_ascii(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}

bool is_ident_part_ascii(char c) { return is_ident_start_ascii(c) || is_digit(c); }

bool non_ascii_ident_char(std::string_view text, std::size_t pos, std::size_t& width) {
    if (static_cast<unsigned char>(text[pos]) < 0x80) return false;
    char32_t cp;
    width = utf8::decode(text, pos, cp);
    return width != 0 && !is_json5_space(cp);
}

constexpr std::array<std::string_view, 5> kJson5Words = {"true", "false", "null", "Infinity", "NaN"};

std::size_t common_prefix(std::string_view a, std::string_view b) {
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    return i;
}

double parse_decimal(std::string_view text) {
    std::string buf;
    buf.reserve(text.size());
    for (char c : text) {
        if (c != '+') buf.push_back(c);
    }
    return std::strtod(buf.c_str(), nullptr);
}

class Lexer {
   public:
    Lexer(std::string_view text, Dialect dialect) : text_(text), dialect_(dialect) {}

    TokenStream run() {
        TokenStream out;
        out.source_len = text_.size();
        std::size_t p  = 0;
        while (p < text_.size()) {
            std::size_t width = 0;
            if (is_whitespace_at(text_, p, dialect_, &width)) {
                p += width;
                continue;
            }
            if (!starts_token(p)) {
                auto q = p;
                while (q < text_.size()) {
                    if (is_whitespace_at(text_, q, dialect_) || starts_token(q)) break;
                    char32_t cp;
                    const auto len = utf8::decode(text_, q, cp);
                    q += len == 0 ? 1 : len;
                }
                Token t;
                t.kind = TokenKind::Error;
                t.span = {p, q};
                out.tokens.push_back(std::move(t));
                p = q;
                continue;
            }
            Token t = lex_one(p);
            p       = t.span.end;
            out.tokens.push_back(std::move(t));
        }
        return out;
    }

   private:
    bool json5() const { return dialect_ == Dialect::Json5; }

    bool starts_token(std::size_t p) const {
        const char c = text_[p];
        switch (c) {
            case '{': case '}': case '[': case ']': case ':': case ',': case '"': case '-':
                return true;
            default:
                break;
        }
        if (is_digit(c)) return true;
        if (!json5()) return c == 't' || c == 'f' || c == 'n';
        if (c == '\'' || c == '+' || c == '.') return true;
        if (c == '/') return p + 1 == text_.size() || text_[p + 1] == '/' || text_[p + 1] == '*';
        if (c == '\\') return p + 1 < text_.size() && text_[p + 1] == 'u';
        if (is_ident_start_ascii(c)) return true;
        std::size_t width;
        return non_ascii_ident_char(text_, p, width);
    }

    Token lex_one(std::size_t p) const {
        const char c = text_[p];
        Token t;
        t.span = {p, p + 1};
        switch (c) {
            case '{': t.kind = TokenKind::LBrace; return t;
            case '}': t.kind = TokenKind::RBrace; return t;
            case '[': t.kind = TokenKind::LBracket; return t;
            case ']': t.kind = TokenKind::RBracket; return t;
            case ':': t.kind = TokenKind::Colon; return t;
            case ',': t.kind = TokenKind::Comma; return t;
            default: break;
        }
        if (c == '"' || (json5() && c == '\'')) {
            auto scan  = scan_string(text_, p, dialect_);
            t.kind     = TokenKind::String;
            t.quote    = c;
            t.span     = {p, scan.end};
            t.complete = scan.complete;
            t.decoded  = std::move(scan.value);
            return t;
        }
        if (!json5()) {
            if (c == '-' || is_digit(c)) return json_number(p);
            return json_keyword(p);
        }
        if (c == '/') return comment(p);
        if (c == '-' || c == '+' || c == '.' || is_digit(c)) return json5_number(p);
        return identifier(p);
    }

    Token json_number(std::size_t p) const {
        const auto n = text_.size();
        Token t;
        t.kind = TokenKind::Number;
        auto q = p;
        auto incomplete = [&](std::size_t end) {
            t.span     = {p, end};
            t.complete = false;
            return t;
        };
        if (text_[q] == '-') ++q;
        if (q == n || !is_digit(text_[q])) return incomplete(q);
        if (text_[q] == '0') {
            ++q;
        } else {
            while (q < n && is_digit(text_[q])) ++q;
        }
        if (q < n && text_[q] == '.') {
            ++q;
            if (q == n || !is_digit(text_[q])) return incomplete(q);
            while (q < n && is_digit(text_[q])) ++q;
        }
        if (q < n && (text_[q] == 'e' || text_[q] == 'E')) {
            ++q;
            if (q < n && (text_[q] == '+' || text_[q] == '-')) ++q;
            if (q == n || !is_digit(text_[q])) return incomplete(q);
            while (q < n && is_digit(text_[q])) ++q;
        }
        t.span   = {p, q};
        t.number = parse_decimal(text_.substr(p, q - p));
        return t;
    }

    Token json_keyword(std::size_t p) const {
        Token t;
        std::string_view word;
        switch (text_[p]) {
            case 't': word = "true", t.kind = TokenKind::True; break;
            case 'f': word = "false", t.kind = TokenKind::False; break;
            default: word = "null", t.kind = TokenKind::Null; break;
        }
        const auto len = common_prefix(text_.substr(p), word);
        t.span         = {p, p + len};
        t.complete     = len == word.size();
        return t;
    }

    Token json5_number(std::size_t p) const {
        const auto n = text_.size();
        Token t;
        t.kind = TokenKind::Number;
        auto q = p;
        auto incomplete = [&](std::size_t end) {
            t.span     = {p, end};
            t.complete = false;
            return t;
        };
        bool negative = false;
        if (text_[q] == '+' || text_[q] == '-') {
            negative = text_[q] == '-';
            ++q;
        }
        if (q == n) return incomplete(q);
        for (std::string_view word : {std::string_view("Infinity"), std::string_view("NaN")}) {
            if (text_[q] != word[0]) continue;
            const auto len = common_prefix(text_.substr(q), word);
            if (len < word.size()) return incomplete(q + len);
            t.span   = {p, q + len};
            t.number = word == "NaN" ? std::numeric_limits<double>::quiet_NaN()
                                     : (negative ? -1.0 : 1.0) * std::numeric_limits<double>::infinity();
            return t;
        }
        if (text_[q] == '0' && q + 1 < n && (text_[q + 1] == 'x' || text_[q + 1] == 'X')) {
            q += 2;
            if (q == n || !is_hex(text_[q])) return incomplete(q);
            double value = 0;
            while (q < n && is_hex(text_[q])) value = value * 16 + hex_value(text_[q++]);
            t.span   = {p, q};
            t.number = negative ? -value : value;
            return t;
        }
        std::size_t int_digits = 0;
        if (q < n && text_[q] == '0') {
            ++q, ++int_digits;
        } else {
            while (q < n && is_digit(text_[q])) ++q, ++int_digits;
        }
        std::size_t frac_digits = 0;
        if (q < n && text_[q] == '.') {
            ++q;
            while (q < n && is_digit(text_[q])) ++q, ++frac_digits;
        }
        if (int_digits == 0 && frac_digits == 0) return incomplete(q);
        if (q < n && (text_[q] == 'e' || text_[q] == 'E')) {
            ++q;
            if (q < n && (text_[q] == '+' || text_[q] == '-')) ++q;
            if (q == n || !is_digit(text_[q])) return incomplete(q);
            while (q < n && is_digit(text_[q])) ++q;
        }
        t.span   = {p, q};
        t.number = parse_decimal(text_.substr(p, q - p));
        return t;
    }

    Token comment(std::size_t p) const {
        const auto n = text_.size();
        Token t;
        t.kind = TokenKind::Comment;
        if (p + 1 == n) {
            t.span     = {p, n};
            t.complete = false;
            return t;
        }
        if (text_[p + 1] == '/') {
            auto q = p + 2;
            while (q < n) {
                char32_t cp;
                const auto len = utf8::decode(text_, q, cp);
                if (len != 0 && is_line_terminator(cp)) break;
                q += len == 0 ? 1 : len;
            }
            t.span = {p, q};
            return t;
        }
        const auto close = text_.find("*/", p + 2);
        if (close == std::string_view::npos) {
            t.span     = {p, n};
            t.complete = false;
        } else {
            t.span = {p, close + 2};
        }
        return t;
    }

    Token identifier(std::size_t p) const {
        const auto n = text_.size();
        Token t;
        t.kind = TokenKind::String;
        t.bare = true;
        auto q = p;
        std::string name;
        while (q < n) {
            const char c = text_[q];
            std::size_t width;
            if (is_ident_part_ascii(c)) {
                name.push_back(c);
                ++q;
            } else if (c == '\\') {
                unsigned value  = 0;
                std::size_t bad = q + 1;
                bool ok         = q + 1 < n && text_[q + 1] == 'u' && read_hex(text_, q + 2, 4, value, bad);
                if (ok && value >= 0xD800 && value <= 0xDFFF) {
                    ok  = false;
                    bad = q + 2;
                }
                if (ok) {
                    utf8::append(name, value);
                    q += 6;
                    continue;
                }
                if (q == p) {
                    t.span     = {p, std::max(bad, p + 1)};
                    t.complete = false;
                    return t;
                }
                break;
            } else if (non_ascii_ident_char(text_, q, width)) {
                name.append(text_.substr(q, width));
                q += width;
            } else {
                break;
            }
        }
        t.span    = {p, q};
        t.decoded = name;
        for (std::size_t i = 0; i < kJson5Words.size(); ++i) {
            const auto word = kJson5Words[i];
            const bool full = name == word;
            const bool partial_at_end = q == n && name.size() < word.size() && word.substr(0, name.size()) == name;
            if (!full && !partial_at_end) continue;
            switch (i) {
                case 0: t.kind = TokenKind::True; break;
                case 1: t.kind = TokenKind::False; break;
                case 2: t.kind = TokenKind::Null; break;
                case 3:
                    t.kind   = TokenKind::Number;
                    t.number = std::numeric_limits<double>::infinity();
                    break;
                default:
                    t.kind   = TokenKind::Number;
                    t.number = std::numeric_limits<double>::quiet_NaN();
                    break;
            }
            t.complete = full;
            break;
        }
        return t;
    }

    std::string_view text_;
    Dialect dialect_;
};

}  // namespace

bool is_whitespace_at(std::string_view text, std::size_t pos, Dialect dialect, std::size_t* width) {
    const char c = text[pos];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        if (width) *width = 1;
        return true;
    }
    if (dialect == Dialect::Json) return false;
    char32_t cp;
    const auto len = utf8::decode(text, pos, cp);
    if (len == 0 || !is_json5_space(cp)) return false;
    if (width) *width = len;
    return true;
}

StringScan scan_string(std::string_view text, std::size_t begin, Dialect dialect) {
    const auto n     = text.size();
    const char quote = text[begin];
    const bool json5 = dialect == Dialect::Json5;
    StringScan s;
    auto p     = begin + 1;
    s.safe_end = p;
    while (true) {
        if (p >= n) return fail(std::move(s), n, DecodeError::Unterminated);
        const auto c = static_cast<unsigned char>(text[p]);
        if (c == static_cast<unsigned char>(quote)) {
            s.end      = p + 1;
            s.safe_end = p;
            s.complete = true;
            return s;
        }
        if (c == '\\') {
            if (p + 1 >= n) return fail(std::move(s), n, DecodeError::Unterminated);
            const char e = text[p + 1];
            switch (e) {
                case '"': s.value.push_back('"'); p += 2; s.safe_end = p; continue;
                case '\\': s.value.push_back('\\'); p += 2; s.safe_end = p; continue;
                case '/': s.value.push_back('/'); p += 2; s.safe_end = p; continue;
                case 'b': s.value.push_back('\b'); p += 2; s.safe_end = p; continue;
                case 'f': s.value.push_back('\f'); p += 2; s.safe_end = p; continue;
                case 'n': s.value.push_back('\n'); p += 2; s.safe_end = p; continue;
                case 'r': s.value.push_back('\r'); p += 2; s.safe_end = p; continue;
                case 't': s.value.push_back('\t'); p += 2; s.safe_end = p; continue;
                default: break;
            }
            if (e == 'u') {
                unsigned hi;
                std::size_t bad;
                if (!read_hex(text, p + 2, 4, hi, bad)) {
                    return fail(std::move(s), bad, bad == n ? DecodeError::Unterminated : DecodeError::InvalidEscape);
                }
                if (hi >= 0xDC00 && hi <= 0xDFFF) return fail(std::move(s), p, DecodeError::LoneSurrogate);
                if (hi >= 0xD800 && hi <= 0xDBFF) {
                    const auto q = p + 6;
                    if (q >= n) return fail(std::move(s), n, DecodeError::Unterminated);
                    if (text[q] != '\\') return fail(std::move(s), q, DecodeError::LoneSurrogate);
                    if (q + 1 >= n) return fail(std::move(s), n, DecodeError::Unterminated);
                    if (text[q + 1] != 'u') return fail(std::move(s), q + 1, DecodeError::LoneSurrogate);
                    unsigned lo;
                    if (!read_hex(text, q + 2, 4, lo, bad)) {
                        return fail(std::move(s), bad, bad == n ? DecodeError::Unterminated : DecodeError::InvalidEscape);
                    }
                    if (lo < 0xDC00 || lo > 0xDFFF) return fail(std::move(s), q, DecodeError::LoneSurrogate);
                    utf8::append(s.value, 0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00));
                    p = q + 6;
                } else {
                    utf8::append(s.value, hi);
                    p += 6;
                }
                s.safe_end = p;
                continue;
            }
            if (!json5) return fail(std::move(s), p + 1, DecodeError::InvalidEscape);
            // JSON5 (ES5) escapes.
            if (e == '\'') {
                s.value.push_back('\'');
                p += 2;
            } else if (e == 'v') {
                s.value.push_back('\v');
                p += 2;
            } else if (e == '0') {
                if (p + 2 < n && is_digit(text[p + 2])) return fail(std::move(s), p + 2, DecodeError::InvalidEscape);
                s.value.push_back('\0');
                p += 2;
            } else if (e == 'x') {
                unsigned v;
                std::size_t bad;
                if (!read_hex(text, p + 2, 2, v, bad)) {
                    return fail(std::move(s), bad, bad == n ? DecodeError::Unterminated : DecodeError::InvalidEscape);
                }
                utf8::append(s.value, v);
                p += 4;
            } else if (is_digit(e)) {
                return fail(std::move(s), p + 1, DecodeError::InvalidEscape);
            } else if (e == '\r') {
                p += (p + 2 < n && text[p + 2] == '\n') ? 3 : 2;
            } else if (e == '\n') {
                p += 2;
            } else {
                char32_t cp;
                const auto len = utf8::decode(text, p + 1, cp);
                if (len == 0) {
                    if (utf8::is_truncated_sequence(text, p + 1)) return fail(std::move(s), n, DecodeError::Unterminated);
                    return fail(std::move(s), p + 1, DecodeError::InvalidUtf8);
                }
                // U+2028 / U+2029 after a backslash are line continuations.
                if (cp != 0x2028 && cp != 0x2029) s.value.append(text.substr(p + 1, len));
                p += 1 + len;
            }
            s.safe_end = p;
            continue;
        }
        if (c < 0x20) {
            if (!json5 || c == '\n' || c == '\r') return fail(std::move(s), p, DecodeError::ControlCharacter);
            s.value.push_back(static_cast<char>(c));
            ++p;
            s.safe_end = p;
            continue;
        }
        if (c < 0x80) {
            s.value.push_back(static_cast<char>(c));
            ++p;
            s.safe_end = p;
            continue;
        }
        char32_t cp;
        const auto len = utf8::decode(text, p, cp);
        if (len == 0) {
            if (utf8::is_truncated_sequence(text, p)) return fail(std::move(s), n, DecodeError::Unterminated);
            return fail(std::move(s), p, DecodeError::InvalidUtf8);
        }
        s.value.append(text.substr(p, len));
        p += len;
        s.safe_end = p;
    }
}

std::string encode_string(std::string_view raw) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(raw.size() + 2);
    out.push_back('"');
    for (char ch : raw) {
        const auto c = static_cast<unsigned char>(ch);
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    out += "\\u00";
                    out.push_back(kHex[c >> 4]);
                    out.push_back(kHex[c & 0xF]);
                } else {
                    out.push_back(ch);
                }
        }
    }
    out.push_back('"');
    return out;
}

DecodeResult decode_string(std::string_view json_literal) {
    if (json_literal.empty() || json_literal.front() != '"') return {{}, DecodeError::NotQuoted};
    auto scan = scan_string(json_literal, 0, Dialect::Json);
    if (!scan.complete) return {{}, scan.error};
    if (scan.end != json_literal.size()) return {{}, DecodeError::TrailingCharacters};
    return {std::move(scan.value), DecodeError::None};
}

TokenStream lex(std::string_view text, Dialect dialect) { return Lexer(text, dialect).run(); }

}  // namespace jsonreward
