#include "synthetic.hpp"

#include "json.hpp"
#include "mojitalk/corpus/emoji.hpp"
#include "mojitalk/util/random.hpp"

namespace mojitalk::testing {

namespace {

constexpr const char* kConsonants = "bdfgklmnprstvz";
constexpr const char* kVowels = "aeiou";

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[rng.uniform_int(v.size())];
}

std::vector<std::string> words(std::size_t n, const std::string& prefix) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(pseudo_word(i, prefix));
  return out;
}

}  // namespace

std::string pseudo_word(std::size_t index, const std::string& prefix) {
  std::string w = prefix;
  const std::size_t nc = 14, nv = 5;
  do {
    w += kConsonants[index % nc];
    index /= nc;
    w += kVowels[index % nv];
    index /= nv;
  } while (index > 0);
  return w;
}

std::vector<corpus::ConversationPair> marker_sentences(std::size_t labels, std::size_t per_label, std::uint64_t seed) {
  Rng rng(seed);
  const auto filler = words(30, "f");
  const auto markers = words(labels, "mk");
  std::vector<corpus::ConversationPair> out;
  for (std::size_t l = 0; l < labels; ++l) {
    for (std::size_t i = 0; i < per_label; ++i) {
      std::vector<std::string> s;
      const std::size_t len = 3 + rng.uniform_int(4);
      const std::size_t at = rng.uniform_int(len + 1);
      for (std::size_t t = 0; t < len; ++t) {
        if (t == at) s.push_back(markers[l]);
        s.push_back(pick(filler, rng));
      }
      if (at == len) s.push_back(markers[l]);
      out.push_back({{"src"}, s, static_cast<int>(l)});
    }
  }
  return out;
}

std::vector<corpus::ConversationPair> memorization_pairs(std::size_t pairs, std::size_t labels, std::uint64_t seed) {
  Rng rng(seed);
  const auto source_words = words(40, "s");
  const auto response_words = words(40, "r");
  std::vector<corpus::ConversationPair> out;
  for (std::size_t i = 0; i < pairs; ++i) {
    corpus::ConversationPair p;
    p.source_tokens = {pseudo_word(i, "q")};
    for (std::size_t t = 0; t < 2; ++t) p.source_tokens.push_back(pick(source_words, rng));
    const std::size_t len = 3 + rng.uniform_int(3);
    for (std::size_t t = 0; t < len; ++t) p.response_tokens.push_back(pick(response_words, rng));
    p.emoji = static_cast<int>(i % labels);
    out.push_back(std::move(p));
  }
  return out;
}

EmotionCorpus emotion_corpus(const EmotionCorpusConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  const auto subjects = words(config.generic_variants, "g");
  const auto tails = words(config.marker_variants, "t");
  const auto markers = words(config.emotions, "mk");
  const auto source_words = words(24, "s");

  std::vector<std::vector<std::string>> sources;
  for (std::size_t i = 0; i < config.sources; ++i) {
    std::vector<std::string> s{pseudo_word(i, "q")};
    for (int t = 0; t < 3; ++t) s.push_back(pick(source_words, rng));
    sources.push_back(std::move(s));
  }

  EmotionCorpus out;
  for (std::size_t e = 0; e < config.emotions; ++e) out.emojis.push_back(static_cast<int>(e));

  auto respond = [&](std::size_t emotion) {
    if (config.scattered_length > 0) {
      std::vector<std::string> r;
      for (std::size_t t = 0; t < config.scattered_length; ++t)
        r.push_back(rng.uniform01() < config.marker_rate ? markers[emotion] : pick(subjects, rng));
      return r;
    }
    if (rng.uniform01() < config.marker_rate)
      return std::vector<std::string>{"oh", markers[emotion], "so", pick(tails, rng)};
    return std::vector<std::string>{"well", "that", "is", pick(subjects, rng)};
  };

  // Train sees every source; validation and test reuse them with fresh draws.
  for (std::size_t s = 0; s < sources.size(); ++s)
    for (std::size_t e = 0; e < config.emotions; ++e) {
      for (std::size_t r = 0; r < config.repeats; ++r)
        out.train.push_back({sources[s], respond(e), out.emojis[e]});
      if (s % 4 == 0) out.validation.push_back({sources[s], respond(e), out.emojis[e]});
      if (s % 4 == 2) out.test.push_back({sources[s], respond(e), out.emojis[e]});
    }
  return out;
}

corpus::Vocab vocab_for(const std::vector<std::vector<corpus::ConversationPair>>& parts) {
  std::vector<std::vector<std::string>> streams;
  for (const auto& part : parts)
    for (const auto& p : part) {
      streams.push_back(p.source_tokens);
      streams.push_back(p.response_tokens);
    }
  return corpus::Vocab::build(streams, corpus::kDefaultVocabCap);
}

std::string raw_emotion_jsonl(std::size_t lines, std::uint64_t seed) {
  Rng rng(seed);
  const auto inventory = corpus::EmojiInventory::defaults();
  const std::vector<std::string> openers = {"what a day", "did you see the game", "i just got home",
                                            "tell me about your weekend", "the weather is strange today"};
  const std::vector<std::string> generic = {"well that is fine", "well that is something", "okay then sure thing"};
  const std::vector<std::string> flavored = {"oh i love it so much", "oh that hurts my heart", "wow that is hilarious"};
  std::string out;
  for (std::size_t i = 0; i < lines; ++i) {
    const int emoji = static_cast<int>(rng.uniform_int(6));
    nlohmann::ordered_json j;
    j["source"] = pick(openers, rng) + " number " + std::to_string(i % 7) + " @friend";
    std::string response = rng.uniform01() < 0.5 ? pick(generic, rng) : pick(flavored, rng);
    response += "!!! " + inventory.at(emoji).emoji;
    if (i % 9 == 4) response = "look http://example.com " + inventory.at(emoji).emoji;
    j["response"] = response;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace mojitalk::testing
