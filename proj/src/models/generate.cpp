#include "mojitalk/models/generate.hpp"

#include <stdexcept>

namespace mojitalk::models {

SampledResponse generate_once(const ResponseModel& model, std::span<const int> source, int emoji,
                              const DecodeOptions& options, Rng& rng) {
  ad::Graph g;
  const Binding b{g, model.params()};
  const SourceEncoding enc = model.encode_source(b, source);
  const ad::Tensor c = model.condition(enc, model.embed_emoji(b, emoji));
  ad::Tensor z;
  if (model.has_latent()) {
    const Gaussian prior = model.prior(b, c);
    z = reparameterize(prior, standard_normal(model.config().latent, rng));
  }
  Generation gen = model.decode(b, c, model.has_latent() ? &z : nullptr, enc.memory, options, rng);
  return {std::move(gen.ids), gen.truncated};
}

BestOfK generate_best_of_k(const ResponseModel& model, const EmojiClassifier& classifier, std::span<const int> source,
                           int emoji, std::size_t k, const DecodeOptions& options, Rng& rng) {
  if (k == 0) throw std::invalid_argument("generate_best_of_k: k must be positive");
  BestOfK out;
  out.score = -1.0;
  for (std::size_t i = 0; i < k; ++i) {
    SampledResponse r = generate_once(model, source, emoji, options, rng);
    double score = -1.0;
    if (!r.ids.empty()) score = classifier.probabilities(r.ids).at(static_cast<std::size_t>(emoji));
    if (score > out.score) {
      out.score = score;
      out.chosen = i;
    }
    out.candidates.push_back(std::move(r.ids));
    out.scores.push_back(score);
  }
  out.all_empty = out.score < 0.0;
  if (out.all_empty) {
    out.score = 0.0;
    out.chosen = 0;
  }
  out.ids = out.candidates[out.chosen];
  return out;
}

std::vector<int> generate_response(const ResponseModel& model, const EmojiClassifier& classifier,
                                   std::span<const int> source, int emoji, const GenerationPolicy& policy, Rng& rng) {
  if (!model.has_latent()) return generate_once(model, source, emoji, policy.base, rng).ids;
  return generate_best_of_k(model, classifier, source, emoji, policy.k, policy.latent, rng).ids;
}

}  // namespace mojitalk::models
