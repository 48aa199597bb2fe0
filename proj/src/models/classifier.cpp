#include "mojitalk/models/classifier.hpp"

#include <stdexcept>

#include "mojitalk/util/io.hpp"

namespace mojitalk::models {

using ad::InitScheme;
using ad::Tensor;

std::map<std::string, std::string> ClassifierConfig::to_metadata() const {
  return {
      {"classifier.vocab_size", std::to_string(vocab_size)}, {"classifier.embed", std::to_string(embed)},
      {"classifier.hidden", std::to_string(hidden)},         {"classifier.num_labels", std::to_string(num_labels)},
      {"classifier.dropout", std::to_string(dropout)},
  };
}

ClassifierConfig ClassifierConfig::from_metadata(const std::map<std::string, std::string>& metadata) {
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = metadata.find(key);
    if (it == metadata.end()) throw CheckpointMismatch("checkpoint metadata lacks " + key);
    return it->second;
  };
  ClassifierConfig c;
  try {
    c.vocab_size = std::stoull(get("classifier.vocab_size"));
    c.embed = std::stoull(get("classifier.embed"));
    c.hidden = std::stoull(get("classifier.hidden"));
    c.num_labels = std::stoull(get("classifier.num_labels"));
    c.dropout = std::stod(get("classifier.dropout"));
  } catch (const std::logic_error& e) {
    throw CheckpointMismatch(std::string("malformed classifier metadata: ") + e.what());
  }
  return c;
}

EmojiClassifier::EmojiClassifier(const ClassifierConfig& config, std::uint64_t seed) : config_(config) {
  if (!config.vocab_size || !config.embed || !config.hidden || !config.num_labels)
    throw std::invalid_argument("EmojiClassifier: zero dimension in config");
  if (config.dropout < 0.0 || config.dropout >= 1.0) throw std::invalid_argument("EmojiClassifier: dropout outside [0, 1)");
  Rng rng(seed);
  const std::size_t H = config.hidden;
  embedding_ = ad::add_parameter(store_, "classifier.embedding", {config.vocab_size, config.embed},
                                 InitScheme::embedding(), rng);
  first_ = BiGru::create(store_, "classifier.rnn1", config.embed, H, rng);
  second_ = BiGru::create(store_, "classifier.rnn2", 2 * H, H, rng);
  output_ = Dense::create(store_, "classifier.output", config.embed + 4 * H, config.num_labels, rng);
}

Tensor EmojiClassifier::logits(const Binding& b, std::span<const int> ids, Rng* train_rng) const {
  if (ids.empty()) throw std::invalid_argument("EmojiClassifier: empty sequence");
  const Tensor table = b(embedding_);
  std::vector<Tensor> embedded;
  embedded.reserve(ids.size());
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size)
      throw std::invalid_argument("EmojiClassifier: token id " + std::to_string(id) + " outside vocabulary");
    Tensor e = ad::embedding_lookup(table, id);
    if (train_rng) e = dropout(e, config_.dropout, *train_rng);
    embedded.push_back(e);
  }
  const BiGruOutput l1 = first_.run(b, embedded);
  const BiGruOutput l2 = second_.run(b, l1.positions);
  Tensor pooled = ad::concat({mean_rows(ad::stack(embedded)), mean_rows(l1.memory), mean_rows(l2.memory)});
  if (train_rng) pooled = dropout(pooled, config_.dropout, *train_rng);
  return output_.apply(b, pooled);
}

std::vector<double> EmojiClassifier::probabilities(std::span<const int> ids) const {
  ad::Graph g;
  const Tensor p = ad::softmax(logits({g, store_}, ids));
  return {p.values().begin(), p.values().end()};
}

ad::Checkpoint EmojiClassifier::to_checkpoint(const std::map<std::string, std::string>& extra) const {
  ad::Checkpoint ck;
  ck.kind = std::string(kClassifierKind);
  ck.metadata = extra;
  for (const auto& [k, v] : config_.to_metadata()) ck.metadata[k] = v;
  ck.params = store_;
  return ck;
}

EmojiClassifier EmojiClassifier::from_checkpoint(const ad::Checkpoint& checkpoint) {
  if (checkpoint.kind != kClassifierKind)
    throw CheckpointMismatch("checkpoint kind '" + checkpoint.kind + "' is not a classifier");
  EmojiClassifier c(ClassifierConfig::from_metadata(checkpoint.metadata), 0);
  for (ad::Parameter& p : c.store_) {
    const ad::Parameter* src = checkpoint.params.find(p.name);
    if (!src || src->shape != p.shape) throw CheckpointMismatch("classifier checkpoint lacks or misshapes " + p.name);
    p.value = src->value;
  }
  return c;
}

int label_rank(std::span<const double> probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size())
    throw std::invalid_argument("label_rank: label " + std::to_string(label) + " out of range");
  const double target = probs[static_cast<std::size_t>(label)];
  int rank = 1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool ahead = probs[i] > target || (probs[i] == target && static_cast<int>(i) < label);
    if (ahead) ++rank;
  }
  return rank;
}

}  // namespace mojitalk::models
