#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mojitalk/corpus/emoji.hpp"
#include "mojitalk/corpus/normalize.hpp"

namespace mojitalk::corpus {

struct RawPair {
  std::string source;
  std::string response;
  std::map<std::string, std::string> metadata;
};

struct ConversationPair {
  std::vector<std::string> source_tokens;
  std::vector<std::string> response_tokens;
  int emoji = 0;

  bool operator==(const ConversationPair&) const = default;
};

using LanguagePredicate = std::function<bool(const RawPair&)>;

LanguagePredicate accept_all_languages();
// Accepts a pair when at least `min_ratio` of the letters in both texts are ASCII.
LanguagePredicate ascii_ratio_language(double min_ratio = 0.8);

struct PipelineConfig {
  NormalizerConfig normalizer;
  LanguagePredicate language = accept_all_languages();
};

namespace reject {
inline constexpr std::string_view kMediaOrUrl = "media-or-url";
inline constexpr std::string_view kTooFewWords = "too-few-words";
inline constexpr std::string_view kNoLabelEmoji = "no-label-emoji";
inline constexpr std::string_view kLanguage = "non-english";
}  // namespace reject

struct FilterDecision {
  bool accepted = false;
  std::string reason;  // empty when accepted
};

bool has_url(std::string_view text);

// Applies the admission rules to one raw pair: media/URL, at least three
// purely alphabetical words on each side, a label emoji in the response, and
// the language predicate.
FilterDecision filter_pair(const RawPair& raw, const EmojiInventory& inventory, const PipelineConfig& config = {});

struct CorpusBuild {
  std::vector<ConversationPair> pairs;
  EmojiInventory inventory;                       // with global occurrence counts
  std::array<std::uint64_t, kNumEmojiLabels> label_counts{};
  std::map<std::string, std::uint64_t> rejections;
  std::size_t raw_count = 0;
};

// Two passes: global emoji occurrence counts over every raw response, then
// filtering, labeling and normalization of each pair in input order.
CorpusBuild build_corpus(const std::vector<RawPair>& raw, EmojiInventory inventory, const PipelineConfig& config = {});

struct SplitFractions {
  double train = 0.9;
  double validation = 0.05;
  double test = 0.05;
};

struct CorpusSplits {
  std::vector<ConversationPair> train;
  std::vector<ConversationPair> validation;
  std::vector<ConversationPair> test;
  std::vector<std::string> warnings;
};

CorpusSplits split_corpus(const std::vector<ConversationPair>& pairs, const SplitFractions& fractions, std::uint64_t seed);

// Line-delimited JSON: {"source": ..., "response": ..., "metadata": {...}}.
std::vector<RawPair> parse_raw_pairs(std::string_view text);
// Line-delimited JSON: {"source_tokens": [...], "response_tokens": [...], "emoji_id": n}.
std::string serialize_pairs(const std::vector<ConversationPair>& pairs);
std::vector<ConversationPair> parse_pairs(std::string_view text);

// Per-emoji label counts as a text table, rows ordered by count (desc, then id).
std::string stats_table(const CorpusBuild& build);
std::string stats_json(const CorpusBuild& build);

}  // namespace mojitalk::corpus
