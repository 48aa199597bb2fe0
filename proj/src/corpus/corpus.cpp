#include "mojitalk/corpus/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "mojitalk/corpus/unicode.hpp"
#include "mojitalk/util/io.hpp"
#include "mojitalk/util/random.hpp"

namespace mojitalk::corpus {

using nlohmann::json;

LanguagePredicate accept_all_languages() {
  return [](const RawPair&) { return true; };
}

LanguagePredicate ascii_ratio_language(double min_ratio) {
  return [min_ratio](const RawPair& raw) {
    std::size_t letters = 0, ascii = 0;
    for (const std::string* text : {&raw.source, &raw.response})
      for (char32_t cp : utf8_decode(*text)) {
        const CharClass c = classify(cp);
        if (c == CharClass::letter) {
          ++letters;
          ++ascii;
        } else if (c == CharClass::other) {
          ++letters;
        }
      }
    return letters == 0 || static_cast<double>(ascii) >= min_ratio * static_cast<double>(letters);
  };
}

bool has_url(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower.find("http://") != std::string::npos || lower.find("https://") != std::string::npos ||
         lower.find("www.") != std::string::npos || lower.find("pic.twitter.com") != std::string::npos;
}

namespace {

bool truthy(const std::map<std::string, std::string>& metadata, const std::string& key) {
  auto it = metadata.find(key);
  if (it == metadata.end()) return false;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return v == "1" || v == "true" || v == "yes";
}

std::size_t alphabetical_words(const std::vector<std::string>& tokens) {
  return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(), [](const std::string& t) { return is_alphabetical_word(t); }));
}

}  // namespace

FilterDecision filter_pair(const RawPair& raw, const EmojiInventory& inventory, const PipelineConfig& config) {
  if (truthy(raw.metadata, "media") || truthy(raw.metadata, "has_media") || has_url(raw.source) || has_url(raw.response))
    return {false, std::string(reject::kMediaOrUrl)};
  const auto source = tokenize(raw.source, config.normalizer);
  const auto response = tokenize(raw.response, config.normalizer);
  if (alphabetical_words(source) < 3 || alphabetical_words(response) < 3) return {false, std::string(reject::kTooFewWords)};
  if (!select_emoji_label(response, inventory)) return {false, std::string(reject::kNoLabelEmoji)};
  if (!config.language(raw)) return {false, std::string(reject::kLanguage)};
  return {true, ""};
}

CorpusBuild build_corpus(const std::vector<RawPair>& raw, EmojiInventory inventory, const PipelineConfig& config) {
  CorpusBuild build;
  build.raw_count = raw.size();
  inventory.reset_counts();
  for (const RawPair& r : raw) inventory.count_occurrences(tokenize(r.response, config.normalizer));
  build.inventory = std::move(inventory);

  for (const RawPair& r : raw) {
    const FilterDecision decision = filter_pair(r, build.inventory, config);
    if (!decision.accepted) {
      ++build.rejections[decision.reason];
      continue;
    }
    const auto response_raw_tokens = tokenize(r.response, config.normalizer);
    ConversationPair pair;
    pair.emoji = *select_emoji_label(response_raw_tokens, build.inventory);
    pair.source_tokens = dedup_runs(tokenize(r.source, config.normalizer));
    pair.response_tokens = dedup_runs(response_raw_tokens);
    ++build.label_counts[static_cast<std::size_t>(pair.emoji)];
    build.pairs.push_back(std::move(pair));
  }
  return build;
}

CorpusSplits split_corpus(const std::vector<ConversationPair>& pairs, const SplitFractions& fractions, std::uint64_t seed) {
  const double total = fractions.train + fractions.validation + fractions.test;
  if (fractions.train < 0 || fractions.validation < 0 || fractions.test < 0 || std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("split fractions must be non-negative and sum to 1");
  const std::size_t n = pairs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(i)]);

  const auto n_val = static_cast<std::size_t>(std::llround(fractions.validation * static_cast<double>(n)));
  const auto n_test = std::min(n - std::min(n, n_val), static_cast<std::size_t>(std::llround(fractions.test * static_cast<double>(n))));
  const std::size_t n_train = n - std::min(n, n_val) - n_test;

  CorpusSplits splits;
  for (std::size_t i = 0; i < n; ++i) {
    const ConversationPair& p = pairs[order[i]];
    if (i < n_train)
      splits.train.push_back(p);
    else if (i < n_train + n_val)
      splits.validation.push_back(p);
    else
      splits.test.push_back(p);
  }
  if (splits.train.empty()) splits.warnings.push_back("train split is empty");
  if (splits.validation.empty()) splits.warnings.push_back("validation split is empty");
  if (splits.test.empty()) splits.warnings.push_back("test split is empty");
  return splits;
}

namespace {

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) f(line, line_no);
    pos = end + 1;
  }
}

}  // namespace

std::vector<RawPair> parse_raw_pairs(std::string_view text) {
  std::vector<RawPair> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    try {
      const json j = json::parse(line);
      RawPair r;
      r.source = j.at("source").get<std::string>();
      r.response = j.at("response").get<std::string>();
      if (j.contains("metadata"))
        for (const auto& [k, v] : j.at("metadata").items()) r.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
      if (r.source.empty() || r.response.empty()) throw std::invalid_argument("empty source or response");
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw InputError("raw pairs line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

std::string serialize_pairs(const std::vector<ConversationPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    json j;
    j["source_tokens"] = p.source_tokens;
    j["response_tokens"] = p.response_tokens;
    j["emoji_id"] = p.emoji;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<ConversationPair> parse_pairs(std::string_view text) {
  std::vector<ConversationPair> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    try {
      const json j = json::parse(line);
      ConversationPair p;
      p.source_tokens = j.at("source_tokens").get<std::vector<std::string>>();
      p.response_tokens = j.at("response_tokens").get<std::vector<std::string>>();
      p.emoji = j.at("emoji_id").get<int>();
      if (p.emoji < 0 || p.emoji >= kNumEmojiLabels) throw std::invalid_argument("emoji_id out of range");
      if (p.source_tokens.empty() || p.response_tokens.empty()) throw std::invalid_argument("empty token list");
      out.push_back(std::move(p));
    } catch (const std::exception& e) {
      throw InputError("pairs line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

namespace {

std::vector<int> rows_by_count(const CorpusBuild& build) {
  std::vector<int> ids(kNumEmojiLabels);
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return build.label_counts[a] > build.label_counts[b]; });
  return ids;
}

}  // namespace

std::string stats_table(const CorpusBuild& build) {
  std::ostringstream out;
  out << "raw pairs: " << build.raw_count << "\naccepted: " << build.pairs.size() << "\n";
  for (const auto& [reason, count] : build.rejections) out << "rejected " << reason << ": " << count << "\n";
  out << "\nrank\tid\temoji\tname\tconversations\toccurrences\n";
  int rank = 0;
  for (int id : rows_by_count(build)) {
    const auto& e = build.inventory.at(id);
    out << rank++ << '\t' << id << '\t' << e.emoji << '\t' << e.name << '\t' << build.label_counts[id] << '\t' << e.count << '\n';
  }
  return out.str();
}

std::string stats_json(const CorpusBuild& build) {
  json j;
  j["raw_pairs"] = build.raw_count;
  j["accepted"] = build.pairs.size();
  j["rejections"] = build.rejections;
  json rows = json::array();
  for (int id : rows_by_count(build)) {
    const auto& e = build.inventory.at(id);
    rows.push_back({{"id", id}, {"emoji", e.emoji}, {"name", e.name}, {"conversations", build.label_counts[id]}, {"occurrences", e.count}});
  }
  j["emojis"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace mojitalk::corpus
