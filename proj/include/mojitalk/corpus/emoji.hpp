#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mojitalk::corpus {

inline constexpr int kNumEmojiLabels = 64;

struct EmojiEntry {
  std::string emoji;  // canonical cluster, no skin tone or variation selector
  std::string name;
  std::uint64_t count = 0;  // global corpus occurrences
};

// The fixed label set. Index order is the label id.
class EmojiInventory {
 public:
  EmojiInventory() = default;
  explicit EmojiInventory(std::vector<EmojiEntry> entries, std::map<std::string, int> aliases = {});

  // Built-in 64-emoji set with zero counts.
  static EmojiInventory defaults();
  // Parses the TSV inventory format ("index<TAB>emoji<TAB>name" lines and
  // "alias<TAB>variant<TAB>index" lines).
  static EmojiInventory parse(std::string_view text);
  std::string to_tsv() const;

  std::size_t size() const { return entries_.size(); }
  const EmojiEntry& at(int id) const { return entries_.at(static_cast<std::size_t>(id)); }
  const std::vector<EmojiEntry>& entries() const { return entries_; }

  // Label id of an emoji token, after canonicalization; nullopt when the token
  // is not one of the labels.
  std::optional<int> label_of(std::string_view token) const;

  void set_count(int id, std::uint64_t count) { entries_.at(static_cast<std::size_t>(id)).count = count; }
  void reset_counts();
  // Adds the label occurrences found in a token stream to the global counts.
  void count_occurrences(const std::vector<std::string>& tokens);

  // Stable hash of the label set (emoji and order, not counts).
  std::string fingerprint() const;

 private:
  std::vector<EmojiEntry> entries_;
  std::map<std::string, int> index_;
};

// Strips skin-tone modifiers and variation selectors from an emoji cluster.
std::string canonical_emoji(std::string_view cluster);

// Picks the label emoji with the most occurrences in tokens (counted before
// deduplication). Ties go to the globally rarer emoji, then the lower id.
// nullopt when no label emoji occurs.
std::optional<int> select_emoji_label(const std::vector<std::string>& tokens, const EmojiInventory& inventory);

}  // namespace mojitalk::corpus
