#include "mojitalk/corpus/unicode.hpp"

namespace mojitalk::corpus {

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      out.push_back(U'�');
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      if (i + k >= text.size()) {
        ok = false;
        break;
      }
      const unsigned char cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

void utf8_append(std::string& out, char32_t cp) {
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

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) utf8_append(out, cp);
  return out;
}

bool is_ascii_letter(char32_t cp) { return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z'); }
bool is_skin_tone(char32_t cp) { return cp >= 0x1F3FB && cp <= 0x1F3FF; }
bool is_regional_indicator(char32_t cp) { return cp >= 0x1F1E6 && cp <= 0x1F1FF; }

namespace {

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_emoji_base(char32_t cp) {
  return in(cp, 0x1F000, 0x1F3FA) || in(cp, 0x1F400, 0x1FAFF) || in(cp, 0x2600, 0x27BF) ||
         in(cp, 0x2300, 0x23FF) || in(cp, 0x2B00, 0x2BFF) || in(cp, 0x25A0, 0x25FF) || in(cp, 0x2190, 0x21FF) ||
         in(cp, 0x2934, 0x2935) || cp == 0x203C || cp == 0x2049 || cp == 0x2122 || cp == 0x2139 || cp == 0x3030 ||
         cp == 0x303D || cp == 0x3297 || cp == 0x3299 || cp == 0x00A9 || cp == 0x00AE;
}

}  // namespace

CharClass classify(char32_t cp) {
  if (cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' || cp == U'\f' || cp == 0x00A0 ||
      in(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000)
    return CharClass::space;
  if (is_ascii_letter(cp)) return CharClass::letter;
  if (cp >= U'0' && cp <= U'9') return CharClass::digit;
  if (cp < 0x80) return cp < 0x20 || cp == 0x7F ? CharClass::space : CharClass::punct;
  if (is_skin_tone(cp) || cp == 0xFE0F || cp == 0xFE0E || cp == 0x200D || cp == 0x20E3) return CharClass::emoji_modifier;
  if (is_emoji_base(cp)) return CharClass::emoji;
  if ((in(cp, 0x00A1, 0x00BF) && cp != 0x00AA && cp != 0x00B5 && cp != 0x00BA) || cp == 0x00D7 || cp == 0x00F7 ||
      in(cp, 0x2010, 0x2027) || in(cp, 0x2030, 0x205E) || in(cp, 0x3001, 0x3003) || in(cp, 0x3008, 0x3011) ||
      in(cp, 0xFF01, 0xFF0F))
    return CharClass::punct;
  if (in(cp, 0x200B, 0x200F) || cp == 0xFEFF) return CharClass::emoji_modifier;
  return CharClass::other;
}

}  // namespace mojitalk::corpus
