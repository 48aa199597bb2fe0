#include "mojitalk/training/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mojitalk::training {

using ad::Tensor;
using models::Binding;
using models::Gaussian;

Example encode_example(const corpus::ConversationPair& pair, const corpus::Vocab& vocab) {
  return {vocab.encode(pair.source_tokens), vocab.encode(pair.response_tokens), pair.emoji};
}

std::vector<Example> encode_examples(const std::vector<corpus::ConversationPair>& pairs, const corpus::Vocab& vocab) {
  std::vector<Example> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(encode_example(p, vocab));
  return out;
}

Tensor kl_divergence(const Gaussian& q, const Gaussian& p) {
  if (q.mean.shape() != p.mean.shape()) throw std::invalid_argument("kl_divergence: dimension mismatch");
  const Tensor diff = ad::sub(q.mean, p.mean);
  const Tensor spread = ad::add(ad::exp(q.log_var), ad::multiply(diff, diff));
  const Tensor ratio = ad::multiply(spread, ad::exp(ad::scale(p.log_var, -1.0)));
  const Tensor inner = ad::add(ad::sub(p.log_var, q.log_var), ratio);
  return ad::scale(ad::add_scalar(ad::sum(inner), -static_cast<double>(q.mean.size())), 0.5);
}

Tensor reconstruction_loss(const Tensor& logits, std::span<const int> targets) {
  if (logits.shape().size() != 2 || logits.shape()[0] != targets.size())
    throw std::invalid_argument("reconstruction_loss: " + std::to_string(targets.size()) + " targets for logits " +
                                ad::shape_to_string(logits.shape()));
  return ad::cross_entropy(logits, targets);
}

Tensor bow_loss(const Tensor& logits, std::span<const int> targets) {
  if (targets.empty()) throw std::invalid_argument("bow_loss: empty target");
  const std::vector<Tensor> rows(targets.size(), logits);
  return ad::cross_entropy(ad::stack(rows), targets);
}

double kl_weight(std::size_t step, const KlSchedule& schedule) {
  if (schedule.anneal_steps == 0 || step >= schedule.anneal_steps) return schedule.target;
  return schedule.target * static_cast<double>(step) / static_cast<double>(schedule.anneal_steps);
}

double alpha_coefficient(int rank) {
  if (rank < 1 || rank > 64) throw std::invalid_argument("alpha_coefficient: rank " + std::to_string(rank) + " outside 1..64");
  if (rank == 1) return 0.0;
  if (rank <= 5) return 0.5;
  return 1.0;
}

Tensor reinforce_objective(const Tensor& log_prob_sum, const RewardRecord& reward) {
  return ad::scale(log_prob_sum, reward.alpha * (reward.reward - reward.baseline));
}

RewardRecord classifier_reward(const models::EmojiClassifier& classifier, std::span<const int> generated,
                               const Example& target) {
  const auto label = static_cast<std::size_t>(target.emoji);
  RewardRecord r;
  r.rank = static_cast<int>(classifier.config().num_labels);
  if (!generated.empty()) {
    const auto probs = classifier.probabilities(generated);
    r.reward = probs.at(label);
    r.rank = models::label_rank(probs, target.emoji);
  }
  if (!target.response.empty()) r.baseline = classifier.probabilities(target.response).at(label);
  r.alpha = alpha_coefficient(r.rank);
  return r;
}

RewardFn classifier_reward_fn(const models::EmojiClassifier& classifier) {
  return [&classifier](std::span<const int> generated, const Example& target) {
    return classifier_reward(classifier, generated, target);
  };
}

namespace {

std::vector<int> frame(const std::vector<int>& response) {
  std::vector<int> framed;
  framed.reserve(response.size() + 2);
  framed.push_back(corpus::kSosId);
  framed.insert(framed.end(), response.begin(), response.end());
  framed.push_back(corpus::kEosId);
  return framed;
}

struct Variational {
  Tensor reconstruction;
  Tensor kl;
  Tensor bow;
  Tensor condition;
  Tensor memory;
  Tensor z;
  Gaussian prior;
};

Variational variational_forward(const Binding& b, const models::ResponseModel& model, const Example& ex, Rng& noise) {
  if (ex.response.empty()) throw std::invalid_argument("latent model training needs non-empty responses");
  const auto enc = model.encode_source(b, ex.source);
  Variational v;
  v.memory = enc.memory;
  v.condition = model.condition(enc, model.embed_emoji(b, ex.emoji));
  const Tensor x = model.encode_response(b, ex.response);
  const Gaussian q = model.recognition(b, x, v.condition);
  v.prior = model.prior(b, v.condition);
  v.z = models::reparameterize(q, models::standard_normal(model.config().latent, noise));
  v.kl = kl_divergence(q, v.prior);
  const auto framed = frame(ex.response);
  const Tensor logits = model.teacher_forced_logits(b, v.condition, &v.z, v.memory, framed);
  v.reconstruction = reconstruction_loss(logits, std::span<const int>(framed).subspan(1));
  v.bow = bow_loss(model.bow_logits(b, v.z, v.condition), ex.response);
  return v;
}

void require_batch(std::span<const Example> batch) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
}

Tensor batch_mean(std::span<const Tensor> totals) {
  return ad::scale(ad::sum(ad::concat(totals)), 1.0 / static_cast<double>(totals.size()));
}

void finish(BatchGradients& out, ad::Graph& g, const Tensor& total, const ad::ParameterStore& store, bool grads) {
  const double n = static_cast<double>(out.loss.examples);
  out.loss.kl /= n;
  out.loss.reconstruction /= n;
  out.loss.bow /= n;
  out.loss.policy /= n;
  out.loss.total = total.item();
  if (grads) out.grads = g.backward(total).collect(store);
}

BatchGradients base_pass(const models::ResponseModel& model, std::span<const Example> batch, bool grads);
BatchGradients variational_pass(const models::ResponseModel& model, const RewardFn& reward,
                                std::span<const Example> batch, double weight, const ReinforceSettings& settings,
                                Rng& noise, Rng& sampler, bool grads);

}  // namespace

std::string_view policy_latent_name(PolicyLatent latent) {
  return latent == PolicyLatent::prior ? "prior" : "posterior";
}

PolicyLatent parse_policy_latent(std::string_view name) {
  if (name == "prior") return PolicyLatent::prior;
  if (name == "posterior") return PolicyLatent::posterior;
  throw std::invalid_argument("unknown policy latent '" + std::string(name) + "' (expected prior or posterior)");
}

BatchGradients base_gradients(const models::ResponseModel& model, std::span<const Example> batch) {
  return base_pass(model, batch, true);
}

LossBreakdown base_loss(const models::ResponseModel& model, std::span<const Example> batch) {
  return base_pass(model, batch, false).loss;
}

BatchGradients cvae_gradients(const models::ResponseModel& model, std::span<const Example> batch, double weight,
                              Rng& noise) {
  ReinforceSettings off;
  off.policy_active = false;
  return variational_pass(model, {}, batch, weight, off, noise, noise, true);
}

LossBreakdown cvae_loss(const models::ResponseModel& model, std::span<const Example> batch, double weight,
                        Rng& noise) {
  ReinforceSettings off;
  off.policy_active = false;
  return variational_pass(model, {}, batch, weight, off, noise, noise, false).loss;
}

BatchGradients reinforced_gradients(const models::ResponseModel& model, const RewardFn& reward,
                                    std::span<const Example> batch, double weight, const ReinforceSettings& settings,
                                    Rng& noise, Rng& sampler) {
  return variational_pass(model, reward, batch, weight, settings, noise, sampler, true);
}

namespace {

BatchGradients base_pass(const models::ResponseModel& model, std::span<const Example> batch, bool grads) {
  require_batch(batch);
  ad::Graph g;
  const Binding b{g, model.params()};
  BatchGradients out;
  std::vector<Tensor> totals;
  for (const Example& ex : batch) {
    const auto enc = model.encode_source(b, ex.source);
    const Tensor c = model.condition(enc, model.embed_emoji(b, ex.emoji));
    const auto framed = frame(ex.response);
    const Tensor logits = model.teacher_forced_logits(b, c, nullptr, enc.memory, framed);
    const Tensor rec = reconstruction_loss(logits, std::span<const int>(framed).subspan(1));
    out.loss.reconstruction += rec.item();
    out.loss.tokens += framed.size() - 1;
    totals.push_back(rec);
  }
  out.loss.examples = batch.size();
  finish(out, g, batch_mean(totals), model.params(), grads);
  return out;
}

BatchGradients variational_pass(const models::ResponseModel& model, const RewardFn& reward,
                                std::span<const Example> batch, double weight, const ReinforceSettings& settings,
                                Rng& noise, Rng& sampler, bool grads) {
  require_batch(batch);
  if (!model.has_latent()) throw std::logic_error("variational objective needs a latent-variable model");
  const bool policy = settings.policy_active && settings.lambda != 0.0;
  if (policy && !reward) throw std::invalid_argument("reinforced_gradients: no reward function");
  ad::Graph g;
  const Binding b{g, model.params()};
  BatchGradients out;
  out.loss.kl_weight = weight;
  std::vector<Tensor> totals;
  for (const Example& ex : batch) {
    const Variational v = variational_forward(b, model, ex, noise);
    out.loss.kl += v.kl.item();
    out.loss.reconstruction += v.reconstruction.item();
    out.loss.bow += v.bow.item();
    out.loss.tokens += ex.response.size() + 1;
    Tensor total = ad::add(ad::add(v.reconstruction, ad::scale(v.kl, weight)), v.bow);

    if (policy) {
      const Tensor z = settings.latent == PolicyLatent::posterior
                           ? v.z
                           : models::reparameterize(v.prior, models::standard_normal(model.config().latent, sampler));
      const models::Generation gen = model.decode(b, v.condition, &z, v.memory, settings.decode, sampler);
      const RewardRecord r = reward(gen.ids, ex);
      const Tensor j = reinforce_objective(gen.log_prob, r);
      out.loss.policy += j.item();
      if (r.alpha * (r.reward - r.baseline) != 0.0) total = ad::sub(total, ad::scale(j, settings.lambda));
      out.rewards.push_back(r);
      out.generations.push_back(gen.ids);
    }
    totals.push_back(total);
  }
  out.loss.examples = batch.size();
  finish(out, g, batch_mean(totals), model.params(), grads);
  return out;
}

}  // namespace

ClassifierBatch classifier_gradients(const models::EmojiClassifier& classifier, std::span<const LabeledText> batch,
                                     Rng* dropout) {
  if (batch.empty()) throw std::invalid_argument("empty classifier batch");
  ad::Graph g;
  const Binding b{g, classifier.params()};
  ClassifierBatch out;
  std::vector<Tensor> losses;
  for (const LabeledText& ex : batch) {
    const Tensor logits = classifier.logits(b, ex.ids, dropout);
    const auto v = logits.values();
    if (std::max_element(v.begin(), v.end()) - v.begin() == ex.label) ++out.correct;
    losses.push_back(ad::cross_entropy(logits, ex.label));
  }
  const Tensor total = batch_mean(losses);
  out.loss = total.item();
  out.grads = g.backward(total).collect(classifier.params());
  return out;
}

}  // namespace mojitalk::training
