#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mojitalk::corpus {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kSosId = 2;
inline constexpr int kEosId = 3;
inline constexpr int kNumId = 4;
inline constexpr std::size_t kNumReserved = 5;
inline constexpr std::size_t kDefaultVocabCap = 20000;

// Token <-> id bijection. Ids 0..4 are reserved (pad, unk, sos, eos, num);
// the rest are assigned by descending frequency, ties by first occurrence.
class Vocab {
 public:
  Vocab();

  static Vocab build(const std::vector<std::vector<std::string>>& streams, std::size_t cap = kDefaultVocabCap);
  // Parses the "token<TAB>count" format written by serialize().
  static Vocab parse(std::string_view text);
  std::string serialize() const;
  std::string fingerprint() const;

  std::size_t size() const { return tokens_.size(); }
  int id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::uint64_t frequency(int id) const { return counts_.at(static_cast<std::size_t>(id)); }

  std::vector<int> encode(const std::vector<std::string>& tokens) const;
  // Decoder-target framing: SOS, ids..., EOS.
  std::vector<int> encode_target(const std::vector<std::string>& tokens) const;
  // Maps ids back to tokens, stopping at EOS and skipping SOS/PAD.
  std::vector<std::string> decode(const std::vector<int>& ids) const;

 private:
  void push(std::string token, std::uint64_t count);

  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace mojitalk::corpus
