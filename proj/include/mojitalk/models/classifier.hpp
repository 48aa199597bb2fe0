#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mojitalk/autodiff/checkpoint.hpp"
#include "mojitalk/models/layers.hpp"

namespace mojitalk::models {

inline constexpr std::string_view kClassifierKind = "classifier";

struct ClassifierConfig {
  std::size_t vocab_size = 0;
  std::size_t embed = 128;
  std::size_t hidden = 128;
  std::size_t num_labels = 64;
  double dropout = 0.2;

  std::map<std::string, std::string> to_metadata() const;
  static ClassifierConfig from_metadata(const std::map<std::string, std::string>& metadata);
};

// Two stacked bidirectional GRU layers over word embeddings. The embedding
// sequence and both layer outputs are mean-pooled over time and concatenated
// (skip connections) before the projection to label logits.
class EmojiClassifier {
 public:
  EmojiClassifier() = default;
  EmojiClassifier(const ClassifierConfig& config, std::uint64_t seed);

  const ClassifierConfig& config() const { return config_; }
  ad::ParameterStore& params() { return store_; }
  const ad::ParameterStore& params() const { return store_; }

  // Label logits. Dropout is applied only when train_rng is given.
  ad::Tensor logits(const Binding& b, std::span<const int> ids, Rng* train_rng = nullptr) const;

  // Eval-mode label probabilities.
  std::vector<double> probabilities(std::span<const int> ids) const;

  ad::Checkpoint to_checkpoint(const std::map<std::string, std::string>& extra = {}) const;
  static EmojiClassifier from_checkpoint(const ad::Checkpoint& checkpoint);

 private:
  ClassifierConfig config_;
  ad::ParameterStore store_;
  std::size_t embedding_ = 0;
  BiGru first_;
  BiGru second_;
  Dense output_;
};

// 1-based position of `label` when labels are sorted by probability
// descending, ties broken by lower index.
int label_rank(std::span<const double> probs, int label);

}  // namespace mojitalk::models
