#include "mojitalk/corpus/emoji.hpp"

#include <sstream>
#include <stdexcept>

#include "mojitalk/corpus/unicode.hpp"
#include "mojitalk/util/io.hpp"

namespace mojitalk::corpus {

namespace {

struct BuiltinEmoji {
  const char* emoji;
  const char* name;
};

// clang-format off
const BuiltinEmoji kBuiltin[kNumEmojiLabels] = {
    {"\U0001F602", "joy"},
    {"\U0001F612", "unamused"},
    {"\U0001F629", "weary"},
    {"\U0001F62D", "sob"},
    {"\U0001F60D", "heart_eyes"},
    {"\U0001F614", "pensive"},
    {"\U0001F44C", "ok_hand"},
    {"\U0001F60A", "blush"},
    {"\U00002764", "heart"},
    {"\U0001F60F", "smirk"},
    {"\U0001F601", "grin"},
    {"\U0001F3B6", "notes"},
    {"\U0001F633", "flushed"},
    {"\U0001F4AF", "100"},
    {"\U0001F634", "sleeping"},
    {"\U0001F60C", "relieved"},
    {"\U0000263A", "relaxed"},
    {"\U0001F64C", "raised_hands"},
    {"\U0001F495", "two_hearts"},
    {"\U0001F611", "expressionless"},
    {"\U0001F605", "sweat_smile"},
    {"\U0001F64F", "pray"},
    {"\U0001F615", "confused"},
    {"\U0001F618", "kissing_heart"},
    {"\U0001F493", "heartbeat"},
    {"\U0001F610", "neutral_face"},
    {"\U0001F481", "information_desk_person"},
    {"\U0001F61E", "disappointed"},
    {"\U0001F648", "see_no_evil"},
    {"\U0001F62B", "tired_face"},
    {"\U0000270C", "v"},
    {"\U0001F60E", "sunglasses"},
    {"\U0001F621", "rage"},
    {"\U0001F44D", "thumbsup"},
    {"\U0001F622", "cry"},
    {"\U0001F62A", "sleepy"},
    {"\U0001F60B", "yum"},
    {"\U0001F624", "triumph"},
    {"\U0000270B", "hand"},
    {"\U0001F637", "mask"},
    {"\U0001F44F", "clap"},
    {"\U0001F440", "eyes"},
    {"\U0001F52B", "gun"},
    {"\U0001F623", "persevere"},
    {"\U0001F608", "smiling_imp"},
    {"\U0001F613", "sweat"},
    {"\U0001F494", "broken_heart"},
    {"\U0001F49B", "yellow_heart"},
    {"\U0001F3B5", "musical_note"},
    {"\U0001F64A", "speak_no_evil"},
    {"\U0001F609", "wink"},
    {"\U0001F480", "skull"},
    {"\U0001F616", "confounded"},
    {"\U0001F604", "smile"},
    {"\U0001F61C", "stuck_out_tongue_winking_eye"},
    {"\U0001F620", "angry"},
    {"\U0001F645", "no_good"},
    {"\U0001F4AA", "muscle"},
    {"\U0001F44A", "facepunch"},
    {"\U0001F49C", "purple_heart"},
    {"\U0001F496", "sparkling_heart"},
    {"\U0001F499", "blue_heart"},
    {"\U0001F62C", "grimacing"},
    {"\U00002728", "sparkles"},
};
// clang-format on

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    fields.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
    if (tab == std::string::npos) break;
    pos = tab + 1;
  }
  return fields;
}

}  // namespace

std::string canonical_emoji(std::string_view cluster) {
  std::u32string out;
  for (char32_t cp : utf8_decode(cluster))
    if (!is_skin_tone(cp) && cp != 0xFE0F && cp != 0xFE0E) out.push_back(cp);
  return utf8_encode(out);
}

EmojiInventory::EmojiInventory(std::vector<EmojiEntry> entries, std::map<std::string, int> aliases)
    : entries_(std::move(entries)) {
  if (entries_.size() != static_cast<std::size_t>(kNumEmojiLabels))
    throw std::invalid_argument("emoji inventory must have exactly 64 entries, got " + std::to_string(entries_.size()));
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    entries_[i].emoji = canonical_emoji(entries_[i].emoji);
    if (!index_.emplace(entries_[i].emoji, static_cast<int>(i)).second)
      throw std::invalid_argument("duplicate emoji in inventory: " + entries_[i].emoji);
  }
  for (const auto& [variant, id] : aliases) {
    if (id < 0 || id >= kNumEmojiLabels) throw std::invalid_argument("alias points outside the label set");
    index_.emplace(canonical_emoji(variant), id);
  }
}

EmojiInventory EmojiInventory::defaults() {
  std::vector<EmojiEntry> entries;
  for (const auto& e : kBuiltin) entries.push_back({e.emoji, e.name, 0});
  return EmojiInventory(std::move(entries));
}

EmojiInventory EmojiInventory::parse(std::string_view text) {
  std::vector<EmojiEntry> entries(kNumEmojiLabels);
  std::vector<bool> seen(kNumEmojiLabels, false);
  std::map<std::string, int> aliases;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    try {
      if (fields.size() == 3 && fields[0] == "alias") {
        aliases[fields[1]] = std::stoi(fields[2]);
        continue;
      }
      if (fields.size() < 2) throw std::invalid_argument("expected index<TAB>emoji<TAB>name");
      const int id = std::stoi(fields[0]);
      if (id < 0 || id >= kNumEmojiLabels || seen[id]) throw std::invalid_argument("bad or repeated index");
      seen[id] = true;
      entries[id] = {fields[1], fields.size() > 2 ? fields[2] : "", 0};
    } catch (const std::exception& e) {
      throw InputError("emoji inventory line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (int i = 0; i < kNumEmojiLabels; ++i)
    if (!seen[i]) throw InputError("emoji inventory is missing index " + std::to_string(i));
  return EmojiInventory(std::move(entries), std::move(aliases));
}

std::string EmojiInventory::to_tsv() const {
  std::string out;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    out += std::to_string(i) + "\t" + entries_[i].emoji + "\t" + entries_[i].name + "\n";
  return out;
}

std::optional<int> EmojiInventory::label_of(std::string_view token) const {
  auto it = index_.find(canonical_emoji(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void EmojiInventory::reset_counts() {
  for (auto& e : entries_) e.count = 0;
}

void EmojiInventory::count_occurrences(const std::vector<std::string>& tokens) {
  for (const std::string& t : tokens)
    if (auto id = label_of(t)) ++entries_[static_cast<std::size_t>(*id)].count;
}

std::string EmojiInventory::fingerprint() const { return hash_hex(to_tsv()); }

std::optional<int> select_emoji_label(const std::vector<std::string>& tokens, const EmojiInventory& inventory) {
  std::vector<int> occurrences(inventory.size(), 0);
  bool any = false;
  for (const std::string& t : tokens)
    if (auto id = inventory.label_of(t)) {
      ++occurrences[static_cast<std::size_t>(*id)];
      any = true;
    }
  if (!any) return std::nullopt;
  int best = -1;
  for (int id = 0; id < static_cast<int>(inventory.size()); ++id) {
    if (occurrences[id] == 0) continue;
    if (best < 0 || occurrences[id] > occurrences[best] ||
        (occurrences[id] == occurrences[best] && inventory.at(id).count < inventory.at(best).count))
      best = id;
  }
  return best;
}

}  // namespace mojitalk::corpus
