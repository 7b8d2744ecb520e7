#include "meetkit/text.hpp"

#include "meetkit/error.hpp"

namespace meetkit {

std::vector<char32_t> decode_utf8(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        unsigned char b0 = static_cast<unsigned char>(text[i]);
        char32_t cp = 0;
        size_t len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            throw Error("InvalidUtf8", "bad leading byte at offset " + std::to_string(i));
        }
        if (i + len > text.size())
            throw Error("InvalidUtf8", "truncated sequence at offset " + std::to_string(i));
        for (size_t k = 1; k < len; ++k) {
            unsigned char b = static_cast<unsigned char>(text[i + k]);
            if ((b & 0xC0) != 0x80)
                throw Error("InvalidUtf8", "bad continuation byte at offset " + std::to_string(i + k));
            cp = (cp << 6) | (b & 0x3F);
        }
        // reject overlong encodings and surrogate range
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
            throw Error("InvalidUtf8", "invalid scalar value at offset " + std::to_string(i));
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode_utf8(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
}

std::string encode_utf8(const std::vector<char32_t>& codepoints) {
    std::string out;
    out.reserve(codepoints.size() * 3);
    for (char32_t cp : codepoints)
        out += encode_utf8(cp);
    return out;
}

bool is_unicode_space(char32_t cp) {
    switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
        return true;
    default:
        return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_unicode_punct(char32_t cp) {
    // ASCII punctuation and symbols
    if ((cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
        (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E))
        return true;
    // Latin-1 punctuation/symbols
    if ((cp >= 0xA1 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7)
        return true;
    // General punctuation
    if (cp >= 0x2000 && cp <= 0x206F)
        return true;
    // CJK symbols and punctuation
    if (cp >= 0x3001 && cp <= 0x303F)
        return true;
    // Vertical forms, CJK compatibility forms, small form variants
    if (cp >= 0xFE10 && cp <= 0xFE6F)
        return true;
    // Fullwidth/halfwidth punctuation ranges
    if ((cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
        (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65))
        return true;
    return false;
}

char32_t lowercase_latin(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z')
        return cp + 0x20;
    // Latin-1 uppercase block, skipping the multiplication sign
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7)
        return cp + 0x20;
    return cp;
}

std::vector<char32_t> normalize_chars(std::string_view text, TextNorm norm) {
    std::vector<char32_t> raw = decode_utf8(text);
    std::vector<char32_t> out;
    out.reserve(raw.size());
    for (char32_t cp : raw) {
        if (is_unicode_space(cp))
            continue;
        if (norm == TextNorm::Full) {
            if (is_unicode_punct(cp))
                continue;
            cp = lowercase_latin(cp);
        }
        out.push_back(cp);
    }
    return out;
}

std::string normalize_text(std::string_view text, TextNorm norm) {
    return encode_utf8(normalize_chars(text, norm));
}

} // namespace meetkit
