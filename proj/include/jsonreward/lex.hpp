#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jsonreward {

enum class Dialect { Json, Json5 };

enum class TokenKind {
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Comma,
    String,
    Number,
    True,
    False,
    Null,
    Comment,
    Error,
};

std::string_view to_string(TokenKind kind);

/// Half-open byte range [begin, end) into the source text.
struct Span {
    std::size_t begin = 0;
    std::size_t end   = 0;

    std::size_t size() const { return end - begin; }
    bool operator==(const Span&) const = default;
};

/// One lexical token.
///
/// A token is `complete == false` when it starts validly but the input ends
/// or stops being a viable continuation before the token is finished
/// (`"abc` at end of input, `1.` followed by `}`, `tru` at end of input).
/// The span of an incomplete token ends at the first byte that cannot
/// continue it, which is where the lexer resumes.
struct Token {
    TokenKind kind = TokenKind::Error;
    Span span;
    bool complete = true;
    /// JSON5 unquoted identifier lexed as a STRING (only legal as an object key).
    bool bare = false;
    /// Quote character for STRING tokens (`"` or `'`).
    char quote = '"';
    /// Decoded payload for STRING tokens. For incomplete strings this is the
    /// decoded safe prefix.
    std::string decoded;
    /// Parsed value for NUMBER tokens; the exact decimal text is the span.
    double number = 0.0;
};

struct TokenStream {
    std::vector<Token> tokens;
    std::size_t source_len = 0;
};

/// Total lexer: never fails, unlexable input becomes ERROR tokens covering
/// maximal runs of bytes at which no token can start.
TokenStream lex(std::string_view text, Dialect dialect);

bool is_whitespace_at(std::string_view text, std::size_t pos, Dialect dialect, std::size_t* width = nullptr);

enum class DecodeError {
    None,
    NotQuoted,
    Unterminated,
    InvalidEscape,
    LoneSurrogate,
    ControlCharacter,
    InvalidUtf8,
    TrailingCharacters,
};

std::string_view to_string(DecodeError error);

/// Result of scanning one string literal that starts at `begin` (on the quote).
struct StringScan {
    /// One past the closing quote when complete; otherwise the offset of the
    /// first byte that cannot continue the literal (or the input size).
    std::size_t end = 0;
    /// Largest offset such that text[begin, safe_end) followed by the quote
    /// character is a complete, valid literal.
    std::size_t safe_end = 0;
    bool complete = false;
    DecodeError error = DecodeError::None;
    std::string value;
};

StringScan scan_string(std::string_view text, std::size_t begin, Dialect dialect);

/// Quoted JSON literal for `raw`. Escapes `"`, `\` and U+0000..U+001F only.
std::string encode_string(std::string_view raw);

struct DecodeResult {
    std::string value;
    DecodeError error = DecodeError::None;

    bool ok() const { return error == DecodeError::None; }
};

/// Strict JSON string literal decoding. Surrogate pairs combine into one
/// code point; lone surrogates are rejected.
DecodeResult decode_string(std::string_view json_literal);

namespace utf8 {

/// Decodes one code point at `pos`. Returns the byte length, or 0 if the
/// bytes at `pos` are not a valid UTF-8 sequence (including a sequence
/// truncated by the end of input).
std::size_t decode(std::string_view text, std::size_t pos, char32_t& out);

/// True when the bytes from `pos` to the end are a proper prefix of some
/// valid UTF-8 sequence.
bool is_truncated_sequence(std::string_view text, std::size_t pos);

void append(std::string& out, char32_t cp);

/// Code point count; invalid bytes count one each.
std::size_t length(std::string_view text);

}  // namespace utf8

}  // namespace jsonreward
