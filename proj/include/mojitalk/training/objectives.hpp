#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "mojitalk/autodiff/tensor.hpp"
#include "mojitalk/corpus/corpus.hpp"
#include "mojitalk/corpus/vocab.hpp"
#include "mojitalk/models/classifier.hpp"
#include "mojitalk/models/response_model.hpp"

namespace mojitalk::training {

// A conversation pair in id space. `response` carries no SOS/EOS framing.
struct Example {
  std::vector<int> source;
  std::vector<int> response;
  int emoji = 0;
};

Example encode_example(const corpus::ConversationPair& pair, const corpus::Vocab& vocab);
std::vector<Example> encode_examples(const std::vector<corpus::ConversationPair>& pairs, const corpus::Vocab& vocab);

// Closed-form KL(q || p) between diagonal Gaussians, summed over dimensions.
ad::Tensor kl_divergence(const models::Gaussian& q, const models::Gaussian& p);

// Σ_t −log softmax(logits_t)[target_t] for [T, V] logits.
ad::Tensor reconstruction_loss(const ad::Tensor& logits, std::span<const int> targets);

// −Σ_t log softmax(f)[x_t] for one [V] logit vector f and the response tokens.
ad::Tensor bow_loss(const ad::Tensor& logits, std::span<const int> targets);

struct KlSchedule {
  double target = 0.5;
  std::size_t anneal_steps = 0;  // weight reaches target here; 0 means target from the start
};

// Linear ramp from 0 at step 0 to target at anneal_steps, constant after.
double kl_weight(std::size_t step, const KlSchedule& schedule);

// 0 for rank 1, 0.5 for ranks 2..5, 1 otherwise. Ranks outside 1..64 throw.
double alpha_coefficient(int rank);

struct RewardRecord {
  double reward = 0.0;    // R: target probability on the generated response
  double baseline = 0.0;  // r: target probability on the human response
  int rank = 64;          // rank of the target among labels on the generated response
  double alpha = 1.0;
};

// J' = α (R − r) Σ_t log p(x'_t | ...); the coefficient is a constant.
ad::Tensor reinforce_objective(const ad::Tensor& log_prob_sum, const RewardRecord& reward);

// Reward from a frozen classifier. Empty generations get R = 0 and the last rank.
RewardRecord classifier_reward(const models::EmojiClassifier& classifier, std::span<const int> generated,
                               const Example& target);

using RewardFn = std::function<RewardRecord(std::span<const int> generated, const Example& target)>;
RewardFn classifier_reward_fn(const models::EmojiClassifier& classifier);

// Batch-averaged loss terms. total = reconstruction + kl_weight·kl + bow − λ·policy.
struct LossBreakdown {
  double kl = 0.0;
  double reconstruction = 0.0;
  double bow = 0.0;
  double policy = 0.0;
  double total = 0.0;
  double kl_weight = 0.0;
  std::size_t tokens = 0;  // decoder targets including EOS, summed over the batch
  std::size_t examples = 0;
};

struct BatchGradients {
  LossBreakdown loss;
  std::vector<std::vector<double>> grads;  // aligned with the model's store
  std::vector<RewardRecord> rewards;
  std::vector<std::vector<int>> generations;
};

// Teacher-forced seq2seq objective.
BatchGradients base_gradients(const models::ResponseModel& model, std::span<const Example> batch);

// Reconstruction + weighted KL + bag-of-words, with one recognition sample per
// example drawn from `noise`.
BatchGradients cvae_gradients(const models::ResponseModel& model, std::span<const Example> batch, double kl_weight,
                              Rng& noise);

// Loss values only, without a backward pass.
LossBreakdown base_loss(const models::ResponseModel& model, std::span<const Example> batch);
LossBreakdown cvae_loss(const models::ResponseModel& model, std::span<const Example> batch, double kl_weight,
                        Rng& noise);

// Which latent sample decodes the policy generation: a draw from the prior
// network, as at test time, or the recognition sample used by the
// variational terms.
enum class PolicyLatent { prior, posterior };

std::string_view policy_latent_name(PolicyLatent latent);
PolicyLatent parse_policy_latent(std::string_view name);

struct ReinforceSettings {
  double lambda = 1.0;
  bool policy_active = true;
  PolicyLatent latent = PolicyLatent::prior;
  models::DecodeOptions decode{models::DecodeMode::sample, 30, 1.0};
};

// The hybrid objective L' − λJ'. One forward pass yields the variational
// terms and the sampled generation whose log-probability enters J'. Draws
// from `noise` match cvae_gradients exactly; the prior latent (if used) and
// the generation come from the separate `sampler` stream. Nothing is generated when
// the policy is inactive or λ = 0, and an example whose α(R − r) is zero adds
// no policy node to the loss.
BatchGradients reinforced_gradients(const models::ResponseModel& model, const RewardFn& reward,
                                    std::span<const Example> batch, double kl_weight,
                                    const ReinforceSettings& settings, Rng& noise, Rng& sampler);

struct LabeledText {
  std::vector<int> ids;
  int label = 0;
};

struct ClassifierBatch {
  double loss = 0.0;  // mean cross-entropy
  std::size_t correct = 0;
  std::vector<std::vector<double>> grads;
};

// Mean cross-entropy; dropout active when `dropout` is given.
ClassifierBatch classifier_gradients(const models::EmojiClassifier& classifier, std::span<const LabeledText> batch,
                                     Rng* dropout);

}  // namespace mojitalk::training
