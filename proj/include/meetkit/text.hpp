#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace meetkit {

enum class TextNorm {
    Whitespace, // strip whitespace only
    Full,       // strip whitespace + punctuation, lowercase Latin letters
};

// Decodes UTF-8 into Unicode scalar values. Throws Error("InvalidUtf8") on
// malformed sequences.
std::vector<char32_t> decode_utf8(std::string_view text);

std::string encode_utf8(const std::vector<char32_t>& codepoints);
std::string encode_utf8(char32_t cp);

bool is_unicode_space(char32_t cp);
bool is_unicode_punct(char32_t cp);
char32_t lowercase_latin(char32_t cp);

// Normalizes text for character-level scoring. Whitespace is always removed;
// Full mode also removes punctuation and lowercases Latin letters (Han
// characters have no case and pass through unchanged).
std::vector<char32_t> normalize_chars(std::string_view text, TextNorm norm);
std::string normalize_text(std::string_view text, TextNorm norm);

} // namespace meetkit
