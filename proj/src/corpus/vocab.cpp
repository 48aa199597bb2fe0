#include "mojitalk/corpus/vocab.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "mojitalk/corpus/normalize.hpp"
#include "mojitalk/util/io.hpp"

namespace mojitalk::corpus {

namespace {
const char* const kReserved[kNumReserved] = {"<pad>", "<unk>", "<s>", "</s>", "<num>"};
}

Vocab::Vocab() {
  for (const char* t : kReserved) push(t, 0);
}

void Vocab::push(std::string token, std::uint64_t count) {
  if (!index_.emplace(token, static_cast<int>(tokens_.size())).second)
    throw std::invalid_argument("vocab: duplicate token " + token);
  tokens_.push_back(std::move(token));
  counts_.push_back(count);
}

Vocab Vocab::build(const std::vector<std::vector<std::string>>& streams, std::size_t cap) {
  if (cap <= kNumReserved) throw std::invalid_argument("vocab cap must exceed the reserved token count");
  struct Stat {
    std::uint64_t count = 0;
    std::size_t first = 0;
  };
  std::unordered_map<std::string, Stat> stats;
  std::vector<std::string> order;
  std::size_t position = 0;
  Vocab vocab;
  for (const auto& stream : streams)
    for (const std::string& t : stream) {
      auto [it, inserted] = stats.try_emplace(t, Stat{0, position});
      if (inserted) order.push_back(t);
      ++it->second.count;
      ++position;
    }
  std::vector<std::string> candidates;
  for (const std::string& t : order) {
    auto reserved = vocab.index_.find(t);
    if (reserved != vocab.index_.end())
      vocab.counts_[static_cast<std::size_t>(reserved->second)] = stats[t].count;
    else
      candidates.push_back(t);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](const std::string& a, const std::string& b) {
    const Stat& sa = stats[a];
    const Stat& sb = stats[b];
    if (sa.count != sb.count) return sa.count > sb.count;
    return sa.first < sb.first;
  });
  const std::size_t keep = std::min(candidates.size(), cap - kNumReserved);
  for (std::size_t i = 0; i < keep; ++i) vocab.push(candidates[i], stats[candidates[i]].count);
  return vocab;
}

std::string Vocab::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) out += tokens_[i] + "\t" + std::to_string(counts_[i]) + "\n";
  return out;
}

std::string Vocab::fingerprint() const { return hash_hex(serialize()); }

Vocab Vocab::parse(std::string_view text) {
  Vocab vocab;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw InputError("vocab line " + std::to_string(line_no + 1) + ": missing count");
    std::string token = line.substr(0, tab);
    const std::uint64_t count = std::stoull(line.substr(tab + 1));
    if (line_no < kNumReserved) {
      if (token != kReserved[line_no]) throw InputError("vocab: reserved token mismatch at line " + std::to_string(line_no + 1));
      vocab.counts_[line_no] = count;
    } else {
      vocab.push(std::move(token), count);
    }
    ++line_no;
  }
  if (line_no < kNumReserved) throw InputError("vocab: missing reserved tokens");
  return vocab;
}

int Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkId : it->second;
}

bool Vocab::contains(std::string_view token) const { return index_.count(std::string(token)) > 0; }

std::vector<int> Vocab::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<int> Vocab::encode_target(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size() + 2);
  ids.push_back(kSosId);
  for (const auto& t : tokens) ids.push_back(id(t));
  ids.push_back(kEosId);
  return ids;
}

std::vector<std::string> Vocab::decode(const std::vector<int>& ids) const {
  std::vector<std::string> out;
  for (int i : ids) {
    if (i == kEosId) break;
    if (i == kSosId || i == kPadId) continue;
    out.push_back(token(i));
  }
  return out;
}

}  // namespace mojitalk::corpus
