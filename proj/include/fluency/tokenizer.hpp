#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fluency {

// Splits cleaned text on single spaces. Empty input yields no tokens.
std::vector<std::string> whitespace_tokenize(std::string_view text);

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace fluency
