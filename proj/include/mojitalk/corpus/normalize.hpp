#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mojitalk::corpus {

inline constexpr std::string_view kNumToken = "<num>";

struct NormalizerConfig {
  // Whitespace-delimited words kept verbatim as single tokens.
  std::vector<std::string> emoticons = {":)", ":(", ":D", ";)", ":P"};
  bool lowercase = false;
};

// Reads an emoticon list: one emoticon per line, '#' starts a comment line.
std::vector<std::string> parse_emoticons(std::string_view text);

// Token stream before run deduplication: mentions and hashtags dropped,
// punctuation and emoji clusters split off, letter runs capped at two,
// digit-bearing words replaced by the number token. Emoji clusters are
// canonicalized (skin tones and variation selectors removed).
std::vector<std::string> tokenize(std::string_view raw, const NormalizerConfig& config = {});

// Collapses runs of an identical punctuation symbol or identical emoji to one.
std::vector<std::string> dedup_runs(const std::vector<std::string>& tokens);

// Caps every run of one repeated ASCII letter at two.
std::string shorten_letters(std::string_view word);

// tokenize + dedup_runs, joined by single spaces.
std::string normalize_text(std::string_view raw, const NormalizerConfig& config = {});

bool is_punct_token(std::string_view token);
bool is_emoji_token(std::string_view token);
// True when every character is an ASCII letter.
bool is_alphabetical_word(std::string_view token);

std::string join_tokens(const std::vector<std::string>& tokens);
std::vector<std::string> split_tokens(std::string_view text);

}  // namespace mojitalk::corpus
