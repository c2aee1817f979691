#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fluency::utf8 {

// Decodes UTF-8 into code points. Throws DataError naming the byte offset of
// the first invalid sequence (overlong forms and surrogates are rejected).
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view cps);
void append(std::string& out, char32_t cp);

// Splits a string into its code points, each re-encoded as UTF-8.
std::vector<std::string> characters(std::string_view text);

std::size_t length(std::string_view text);

}  // namespace fluency::utf8
