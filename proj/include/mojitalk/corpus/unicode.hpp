#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mojitalk::corpus {

// Decodes UTF-8; malformed bytes become U+FFFD.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);
void utf8_append(std::string& out, char32_t cp);

enum class CharClass { space, letter, digit, punct, emoji, emoji_modifier, other };

CharClass classify(char32_t cp);

bool is_ascii_letter(char32_t cp);
bool is_skin_tone(char32_t cp);
bool is_regional_indicator(char32_t cp);

}  // namespace mojitalk::corpus
