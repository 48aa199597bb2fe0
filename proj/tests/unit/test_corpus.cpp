#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mojitalk/corpus/corpus.hpp"
#include "mojitalk/corpus/unicode.hpp"
#include "mojitalk/corpus/vocab.hpp"
#include "mojitalk/util/io.hpp"
#include "mojitalk/util/random.hpp"

using namespace mojitalk;
using namespace mojitalk::corpus;

namespace {

const EmojiInventory& inventory() {
  static const EmojiInventory inv = EmojiInventory::defaults();
  return inv;
}

// The two emojis of the worked labeling example: label ids 12 and 1.
std::string e_a() { return inventory().at(12).emoji; }
std::string e_b() { return inventory().at(1).emoji; }

std::string worked_response() { return "@amy " + e_a() + " miss you soooo much!!! " + e_b() + " " + e_b() + e_b(); }

}  // namespace

TEST_CASE("worked example normalizes and labels") {
  CHECK(normalize_text(worked_response()) == e_a() + " miss you soo much ! " + e_b());
  const auto label = select_emoji_label(tokenize(worked_response()), inventory());
  REQUIRE(label);
  CHECK(*label == 1);
}

TEST_CASE("repeated punctuation and letters are shortened") {
  CHECK(normalize_text("!!!!") == "!");
  CHECK(normalize_text("yessss") == "yess");
  CHECK(normalize_text("yess") == "yess");
  CHECK(normalize_text("nooooo way") == "noo way");
  CHECK(normalize_text("wait?!?!") == "wait ? ! ? !");
}

TEST_CASE("words containing digits become the number token") {
  CHECK(normalize_text("see you at 3pm or 10") == "see you at <num> or <num>");
  CHECK(normalize_text("<num>") == "<num>");
}

TEST_CASE("mentions and hashtags are removed whole") {
  CHECK(normalize_text("@bob hi there #blessed friend") == "hi there friend");
  CHECK(normalize_text("a # b @") == "a # b @");
}

TEST_CASE("punctuation and emojis are split from words") {
  const std::string joy = inventory().at(0).emoji;
  CHECK(normalize_text("lol" + joy + joy + "ok,fine.") == "lol " + joy + " ok , fine .");
}

TEST_CASE("clitics stay attached to their apostrophe") {
  CHECK(normalize_text("don't you're i'm") == "don 't you 're i 'm");
  CHECK(normalize_text("'hello'") == "' hello '");
}

TEST_CASE("emoticons are atomic words") {
  CHECK(normalize_text("great :) see you :P") == "great :) see you :P");
  NormalizerConfig none;
  none.emoticons.clear();
  CHECK(normalize_text("great :)", none) == "great : )");
}

TEST_CASE("skin tone variants map to one label") {
  const std::string thumbs = inventory().at(33).emoji;
  const std::string dark = thumbs + "\U0001F3FF";
  CHECK(inventory().label_of(dark) == 33);
  CHECK(normalize_text("nice " + dark + thumbs) == "nice " + thumbs);
  const std::string heart_vs = inventory().at(8).emoji + "️";
  CHECK(inventory().label_of(heart_vs) == 8);
}

TEST_CASE("normalization is idempotent on adversarial inputs") {
  const std::vector<std::string> samples = {
      worked_response(),
      "@x #y !!! ??? ...",
      "i'm sooooo 'happy' :) :) :D 2day",
      "a'''s ''m rock'n'roll",
      "\U0001F469‍\U0001F4BB coding \U0001F1FA\U0001F1F8 flags \U0001F3FD",
      "café naïve … “quoted”",
      "<num> << >> <num>",
      "   spaced\t\tout\nlines  ",
  };
  for (const auto& s : samples) {
    const std::string once = normalize_text(s);
    CHECK_MESSAGE(normalize_text(once) == once, s);
  }

  Rng rng(17);
  const std::vector<std::string> alphabet = {"a", "o", "O", "!", "?", "'", "s", "@", "#", "1", " ", " ", ".",
                                             ":)", inventory().at(0).emoji, inventory().at(5).emoji, "\U0001F3FB", "t"};
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const auto len = 1 + rng.uniform_int(20);
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.uniform_int(alphabet.size())];
    const std::string once = normalize_text(s);
    CHECK_MESSAGE(normalize_text(once) == once, s);
  }
}

TEST_CASE("shortening never lengthens") {
  Rng rng(3);
  const std::vector<std::string> alphabet = {"a", "a", "b", "!", "!", inventory().at(0).emoji, "x"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> tokens;
    std::string word;
    const auto len = 1 + rng.uniform_int(12);
    for (std::size_t i = 0; i < len; ++i) {
      tokens.push_back(alphabet[rng.uniform_int(alphabet.size())]);
      word += tokens.back();
    }
    CHECK(dedup_runs(tokens).size() <= tokens.size());
    CHECK(join_tokens(dedup_runs(tokens)).size() <= join_tokens(tokens).size());
    CHECK(shorten_letters(word).size() <= word.size());
  }
}

TEST_CASE("label selection prefers the globally rarer emoji on ties") {
  EmojiInventory inv = inventory();
  inv.set_count(1, 38479);
  inv.set_count(0, 184500);
  const std::vector<std::string> tokens = {"so", "good", inv.at(0).emoji, inv.at(1).emoji};
  CHECK(select_emoji_label(tokens, inv) == 1);
  CHECK(select_emoji_label({"x", inv.at(7).emoji}, inv) == 7);

  EmojiInventory even = inventory();
  CHECK(select_emoji_label({even.at(9).emoji, even.at(4).emoji}, even) == 4);
  CHECK_FALSE(select_emoji_label({"no", "emoji"}, even).has_value());
}

TEST_CASE("selected label always occurs in the response") {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> tokens = {"w"};
    const auto n = 1 + rng.uniform_int(6);
    for (std::size_t i = 0; i < n; ++i) tokens.push_back(inventory().at(static_cast<int>(rng.uniform_int(64))).emoji);
    const auto label = select_emoji_label(tokens, inventory());
    REQUIRE(label);
    CHECK(*label >= 0);
    CHECK(*label < 64);
    CHECK(std::find(tokens.begin(), tokens.end(), inventory().at(*label).emoji) != tokens.end());
  }
}

TEST_CASE("filter rejects with structured reasons") {
  const std::string joy = inventory().at(0).emoji;
  const RawPair short_response{"what are you doing today", "ok " + joy, {}};
  CHECK(filter_pair(short_response, inventory()).reason == "too-few-words");
  const RawPair url{"look at this http://t.co/x now", "that is so funny " + joy, {}};
  CHECK(filter_pair(url, inventory()).reason == "media-or-url");
  const RawPair media{"look at this photo now", "that is so funny " + joy, {{"media", "true"}}};
  CHECK(filter_pair(media, inventory()).reason == "media-or-url");
  const RawPair no_emoji{"look at this photo now", "that is so funny", {}};
  CHECK(filter_pair(no_emoji, inventory()).reason == "no-label-emoji");
  const RawPair worked{"i will miss you all so much", worked_response(), {}};
  CHECK(filter_pair(worked, inventory()).accepted);

  PipelineConfig strict;
  strict.language = ascii_ratio_language(0.9);
  const RawPair foreign{"ééé éé éé abc def ghi", "that is so funny " + joy, {}};
  CHECK(filter_pair(foreign, inventory(), strict).reason == "non-english");
  CHECK(filter_pair(foreign, inventory()).accepted);
}

TEST_CASE("corpus build counts emoji globally before labeling") {
  const std::string joy = inventory().at(0).emoji, unamused = inventory().at(1).emoji;
  std::vector<RawPair> raw = {
      {"one two three", "a b c " + joy + " " + unamused, {}},
      {"four five six", "d e f " + joy + joy, {}},
      {"seven eight nine", "too short", {}},
  };
  const CorpusBuild build = build_corpus(raw, inventory());
  CHECK(build.inventory.at(0).count == 3);
  CHECK(build.inventory.at(1).count == 1);
  REQUIRE(build.pairs.size() == 2);
  CHECK(build.pairs[0].emoji == 1);  // tie broken toward the rarer emoji
  CHECK(build.pairs[1].emoji == 0);
  CHECK(build.pairs[1].response_tokens == std::vector<std::string>{"d", "e", "f", joy});
  CHECK(build.rejections.at("too-few-words") == 1);
  CHECK(stats_table(build).find("accepted: 2") != std::string::npos);
  CHECK(stats_json(build).find("\"conversations\": 1") != std::string::npos);
}

TEST_CASE("vocab orders by frequency then first occurrence") {
  const Vocab vocab = Vocab::build({{"a", "a", "b"}}, 7);
  REQUIRE(vocab.size() == 7);
  CHECK(vocab.id("a") == 5);
  CHECK(vocab.id("b") == 6);
  CHECK(vocab.frequency(vocab.id("a")) == 2);

  const Vocab capped = Vocab::build({{"x", "y", "y", "z"}}, 6);
  CHECK(capped.id("y") == 5);
  CHECK(capped.id("x") == kUnkId);
  CHECK(capped.id("z") == kUnkId);

  const Vocab tied = Vocab::build({{"q", "p"}, {"p", "q"}}, 10);
  CHECK(tied.id("q") < tied.id("p"));
}

TEST_CASE("vocab reserves special tokens and round trips") {
  const Vocab empty = Vocab::build({}, 20000);
  CHECK(empty.size() == kNumReserved);
  CHECK_THROWS_AS(Vocab::build({}, 5), std::invalid_argument);

  const Vocab vocab = Vocab::build({{"hi", "<num>", "there", "<num>"}}, 100);
  CHECK(vocab.id("<num>") == kNumId);
  CHECK(vocab.frequency(kNumId) == 2);
  CHECK(Vocab::parse(vocab.serialize()).serialize() == vocab.serialize());
  CHECK(Vocab::build({{"hi", "<num>", "there", "<num>"}}, 100).serialize() == vocab.serialize());
}

TEST_CASE("target framing and unknown tokens") {
  const Vocab vocab = Vocab::build({{"hello", "world"}}, 100);
  CHECK(vocab.encode_target({}) == std::vector<int>{kSosId, kEosId});
  CHECK(vocab.token(vocab.id("world")) == "world");
  CHECK(vocab.id("never-seen") == kUnkId);
  CHECK(vocab.encode({"hello", "zzz"}) == std::vector<int>{vocab.id("hello"), kUnkId});
  CHECK(vocab.decode(vocab.encode_target({"hello", "world"})) == std::vector<std::string>{"hello", "world"});
}

TEST_CASE("split sizes and determinism") {
  std::vector<ConversationPair> pairs;
  for (int i = 0; i < 100; ++i) pairs.push_back({{"s" + std::to_string(i)}, {"r"}, i % 64});
  const auto a = split_corpus(pairs, {}, 5);
  CHECK(a.train.size() == 90);
  CHECK(a.validation.size() == 5);
  CHECK(a.test.size() == 5);
  const auto b = split_corpus(pairs, {}, 5);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);

  std::set<std::string> seen;
  for (const auto* part : {&a.train, &a.validation, &a.test})
    for (const auto& p : *part) CHECK(seen.insert(p.source_tokens[0]).second);
  CHECK(seen.size() == 100);

  const auto tiny = split_corpus({pairs[0], pairs[1]}, {}, 1);
  CHECK(tiny.train.size() == 2);
  CHECK(tiny.warnings.size() == 2);
  CHECK_THROWS_AS(split_corpus(pairs, {0.5, 0.2, 0.2}, 1), std::invalid_argument);
}

TEST_CASE("raw and labeled pair files round trip") {
  const std::string joy = inventory().at(0).emoji;
  const std::string raw_text = "{\"source\": \"hi there you\", \"response\": \"so funny " + joy +
                               "\", \"metadata\": {\"media\": false}}\n\n{\"source\": \"a\", \"response\": \"b\"}\n";
  const auto raw = parse_raw_pairs(raw_text);
  REQUIRE(raw.size() == 2);
  CHECK(raw[0].metadata.at("media") == "false");
  CHECK_THROWS_AS(parse_raw_pairs("{\"source\": 1}\n"), InputError);

  std::vector<ConversationPair> pairs = {{{"a", "b"}, {"c", joy}, 3}};
  CHECK(parse_pairs(serialize_pairs(pairs)) == pairs);
  CHECK_THROWS_AS(parse_pairs("{\"source_tokens\": [\"a\"], \"response_tokens\": [\"b\"], \"emoji_id\": 64}\n"), InputError);
}

TEST_CASE("inventory file matches the built-in label set") {
  const auto parsed = EmojiInventory::parse(read_file(MOJITALK_DATA_DIR "/emoji_inventory.tsv"));
  CHECK(parsed.fingerprint() == inventory().fingerprint());
  CHECK(parsed.size() == 64);
  CHECK_THROWS_AS(EmojiInventory::parse("0\tx\tname\n"), InputError);

  const auto aliased = EmojiInventory::parse(read_file(MOJITALK_DATA_DIR "/emoji_inventory.tsv") + "alias\t\U0001F639\t0\n");
  CHECK(aliased.label_of("\U0001F639") == 0);
  CHECK(parse_emoticons(read_file(MOJITALK_DATA_DIR "/emoticons.txt")) == NormalizerConfig{}.emoticons);
}

TEST_CASE("utf8 decoding tolerates malformed bytes") {
  CHECK(utf8_decode("a\xff" "b") == U"a�b");
  CHECK(utf8_decode("\xe2\x82") .back() == U'�');
  CHECK(utf8_encode(utf8_decode("café \U0001F602")) == "café \U0001F602");
}
