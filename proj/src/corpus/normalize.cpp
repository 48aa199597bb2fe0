#include "mojitalk/corpus/normalize.hpp"

#include <algorithm>
#include <array>

#include "mojitalk/corpus/unicode.hpp"

namespace mojitalk::corpus {

namespace {

constexpr char32_t kZwj = 0x200D;

bool is_word_char(char32_t cp) {
  const CharClass c = classify(cp);
  return c == CharClass::letter || c == CharClass::digit || c == CharClass::other;
}

bool is_clitic(std::u32string_view letters) {
  static constexpr std::array<std::u32string_view, 7> kClitics = {U"s", U"t", U"m", U"d", U"re", U"ve", U"ll"};
  std::u32string lower(letters);
  for (char32_t& c : lower)
    if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
  return std::find(kClitics.begin(), kClitics.end(), lower) != kClitics.end();
}

std::string finish_word(const std::u32string& chunk) {
  if (std::any_of(chunk.begin(), chunk.end(), [](char32_t c) { return c >= U'0' && c <= U'9'; }))
    return std::string(kNumToken);
  return shorten_letters(utf8_encode(chunk));
}

void tokenize_word(std::u32string_view word, const NormalizerConfig& config, std::vector<std::string>& out) {
  std::u32string chunk;
  auto flush = [&] {
    if (!chunk.empty()) out.push_back(finish_word(chunk));
    chunk.clear();
  };

  std::size_t i = 0;
  const std::size_t n = word.size();
  while (i < n) {
    const char32_t cp = word[i];
    const CharClass cls = classify(cp);
    if (cls == CharClass::emoji) {
      flush();
      std::u32string cluster(1, cp);
      ++i;
      if (is_regional_indicator(cp) && i < n && is_regional_indicator(word[i])) cluster.push_back(word[i++]);
      while (i < n) {
        const char32_t c = word[i];
        if (c == 0xFE0F || c == 0xFE0E || c == 0x20E3 || is_skin_tone(c)) {
          ++i;
        } else if (c == kZwj && i + 1 < n && classify(word[i + 1]) == CharClass::emoji) {
          cluster.push_back(kZwj);
          cluster.push_back(word[i + 1]);
          i += 2;
        } else {
          break;
        }
      }
      out.push_back(utf8_encode(cluster));
    } else if (cls == CharClass::emoji_modifier) {
      ++i;
    } else if (cls == CharClass::punct) {
      if (cp == U'\'' && (chunk.empty() || is_ascii_letter(chunk.back()))) {
        std::size_t j = i + 1;
        while (j < n && is_ascii_letter(word[j])) ++j;
        const bool terminated = j == n || !is_word_char(word[j]);
        if (j > i + 1 && terminated && is_clitic(word.substr(i + 1, j - i - 1))) {
          flush();
          chunk.assign(word.substr(i, j - i));
          flush();
          i = j;
          continue;
        }
      }
      flush();
      std::string token;
      utf8_append(token, cp);
      out.push_back(std::move(token));
      ++i;
    } else {
      char32_t c = cp;
      if (config.lowercase && c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
      chunk.push_back(c);
      ++i;
    }
  }
  flush();
}

}  // namespace

std::vector<std::string> parse_emoticons(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    if (!line.empty() && line[0] != '#') out.push_back(line);
    pos = end + 1;
  }
  return out;
}

std::string shorten_letters(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (char c : word) {
    const bool letter = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (letter && out.size() >= 2 && out[out.size() - 1] == c && out[out.size() - 2] == c) continue;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view raw, const NormalizerConfig& config) {
  const std::u32string text = utf8_decode(raw);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (classify(text[i]) == CharClass::space) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && classify(text[j]) != CharClass::space) ++j;
    const std::u32string_view word(text.data() + i, j - i);
    i = j;

    const std::string word8 = utf8_encode(word);
    if (word8 == kNumToken ||
        std::find(config.emoticons.begin(), config.emoticons.end(), word8) != config.emoticons.end()) {
      out.push_back(word8);
      continue;
    }
    // Mentions and hashtags are dropped whole.
    if ((word[0] == U'@' || word[0] == U'#') && word.size() > 1 && is_word_char(word[1])) continue;
    tokenize_word(word, config, out);
  }
  return out;
}

bool is_punct_token(std::string_view token) {
  const std::u32string cps = utf8_decode(token);
  return cps.size() == 1 && classify(cps[0]) == CharClass::punct;
}

bool is_emoji_token(std::string_view token) {
  const std::u32string cps = utf8_decode(token);
  return !cps.empty() && classify(cps[0]) == CharClass::emoji;
}

bool is_alphabetical_word(std::string_view token) {
  return !token.empty() &&
         std::all_of(token.begin(), token.end(), [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); });
}

std::vector<std::string> dedup_runs(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    if (!out.empty() && out.back() == t && (is_punct_token(t) || is_emoji_token(t))) continue;
    out.push_back(t);
  }
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string normalize_text(std::string_view raw, const NormalizerConfig& config) {
  return join_tokens(dedup_runs(tokenize(raw, config)));
}

}  // namespace mojitalk::corpus
