#pragma once

#include <span>
#include <vector>

#include "mojitalk/models/classifier.hpp"
#include "mojitalk/models/response_model.hpp"

namespace mojitalk::models {

struct SampledResponse {
  std::vector<int> ids;
  bool truncated = false;
};

// One response to `source` conditioned on `emoji`. Latent models draw z from
// the prior network.
SampledResponse generate_once(const ResponseModel& model, std::span<const int> source, int emoji,
                              const DecodeOptions& options, Rng& rng);

struct BestOfK {
  std::vector<int> ids;
  double score = 0.0;  // classifier probability of the target emoji
  std::size_t chosen = 0;
  bool all_empty = false;
  std::vector<std::vector<int>> candidates;
  std::vector<double> scores;  // -1 for empty candidates
};

// k prior draws, one sampled response each, and the one the classifier gives
// the highest target probability (first on ties).
BestOfK generate_best_of_k(const ResponseModel& model, const EmojiClassifier& classifier, std::span<const int> source,
                           int emoji, std::size_t k, const DecodeOptions& options, Rng& rng);

struct GenerationPolicy {
  std::size_t k = 5;
  DecodeOptions latent{DecodeMode::sample, 30, 1.0};
  DecodeOptions base{DecodeMode::greedy, 30, 1.0};
};

// Evaluation protocol: best-of-k sampling for latent models, a single decode
// for the base model.
std::vector<int> generate_response(const ResponseModel& model, const EmojiClassifier& classifier,
                                   std::span<const int> source, int emoji, const GenerationPolicy& policy, Rng& rng);

}  // namespace mojitalk::models
