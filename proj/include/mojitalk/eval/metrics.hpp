#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mojitalk/corpus/emoji.hpp"
#include "mojitalk/corpus/vocab.hpp"
#include "mojitalk/models/generate.hpp"
#include "mojitalk/training/objectives.hpp"

namespace mojitalk::eval {

struct PerplexityResult {
  double perplexity = 0.0;
  double nll = 0.0;  // summed over the dataset
  std::size_t tokens = 0;
  std::size_t prior_samples = 0;  // 0 for the base model
};

// exp(nll / tokens).
double perplexity_from_nll(double nll, std::size_t tokens);

// exp(total NLL / token count), EOS counted. Latent models decode with z from
// the prior network; an example's NLL is the mean over `prior_samples` draws.
PerplexityResult perplexity(const models::ResponseModel& model, const std::vector<training::Example>& data,
                            std::size_t prior_samples = 1, std::uint64_t seed = 1);

// Fraction of rows whose target ranks within the k most probable labels
// (ties broken by lower label index).
double topk_accuracy(const std::vector<std::vector<double>>& probabilities, const std::vector<int>& targets,
                     std::size_t k);

struct EmojiAccuracy {
  double top1 = 0.0;
  double top5 = 0.0;
};

// Classifier accuracy on generated responses; an empty response is a miss.
EmojiAccuracy emoji_accuracy(const models::EmojiClassifier& classifier, const std::vector<std::vector<int>>& responses,
                             const std::vector<int>& targets);

// Distinct n-grams over total n-grams, pooled over responses without crossing
// their boundaries. nullopt when no response has n tokens.
template <typename Token>
std::optional<double> type_token_ratio(const std::vector<std::vector<Token>>& responses, std::size_t n);

extern template std::optional<double> type_token_ratio(const std::vector<std::vector<int>>&, std::size_t);
extern template std::optional<double> type_token_ratio(const std::vector<std::vector<std::string>>&, std::size_t);

using Generator = std::function<std::vector<int>(std::span<const int> source, int emoji)>;

// Generator for the evaluation protocol (best-of-k for latent models). The
// model and classifier must outlive it.
Generator model_generator(const models::ResponseModel& model, const models::EmojiClassifier& classifier,
                          const models::GenerationPolicy& policy, std::uint64_t seed);

struct ControllabilityRow {
  int emoji = 0;
  double top1 = 0.0;
  double top5 = 0.0;
  std::size_t sources = 0;
};

// Sources with duplicates removed, first occurrence kept.
std::vector<std::vector<int>> unique_sources(const std::vector<training::Example>& data);

// Label ids ordered by global corpus count (descending, then id).
std::vector<int> emojis_by_frequency(const corpus::EmojiInventory& inventory);

// For every emoji, one response per source conditioned on it, scored by the
// classifier. Rows follow the order of `emojis`.
std::vector<ControllabilityRow> controllability_report(const Generator& generate,
                                                       const models::EmojiClassifier& classifier,
                                                       const std::vector<std::vector<int>>& sources,
                                                       const std::vector<int>& emojis);

std::string controllability_tsv(const std::vector<ControllabilityRow>& rows, const corpus::EmojiInventory& inventory);
// Horizontal text bars of top-5 accuracy, one line per emoji.
std::string controllability_bars(const std::vector<ControllabilityRow>& rows, const corpus::EmojiInventory& inventory,
                                 std::size_t width = 40);

struct Sample {
  std::vector<std::string> source;
  int emoji = 0;
  std::vector<std::string> target;
  std::vector<std::string> generated;
};

struct EvalConfig {
  std::size_t prior_samples = 1;
  models::GenerationPolicy policy;
  std::uint64_t seed = 1;
  std::size_t max_samples = 5;  // generation samples kept in the report
};

struct EvalReport {
  std::string model_kind;
  PerplexityResult perplexity;
  EmojiAccuracy accuracy;
  std::optional<double> ttr[3];         // generated responses, n = 1..3
  std::optional<double> target_ttr[3];  // human responses, n = 1..3
  std::size_t examples = 0;
  std::vector<Sample> samples;

  std::string to_json() const;
  std::string to_text() const;
};

// Perplexity on gold triples, then one generation per test example conditioned
// on its gold emoji for accuracy and diversity.
EvalReport evaluate(const models::ResponseModel& model, const models::EmojiClassifier& classifier,
                    const std::vector<training::Example>& data, const corpus::Vocab& vocab, const EvalConfig& config);

}  // namespace mojitalk::eval
