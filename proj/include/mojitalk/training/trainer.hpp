#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mojitalk/autodiff/optim.hpp"
#include "mojitalk/training/objectives.hpp"

namespace mojitalk::training {

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double lambda = 1.0;
  double kl_target = 0.5;
  std::size_t kl_anneal_epochs = 6;
  std::size_t policy_start_epoch = 2;
  std::uint64_t seed = 1;
  std::size_t patience = 3;  // epochs without validation improvement; 0 disables early stopping
  std::size_t max_decode_len = 30;
  double temperature = 1.0;
  PolicyLatent policy_latent = PolicyLatent::prior;
  ad::AdamConfig adam;
  // Training already done on the initializing checkpoint. The KL schedule and
  // the policy start are counted from there.
  std::size_t start_epoch = 0;
  std::size_t start_step = 0;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based, counted from start_epoch
  std::string split;      // "train" or "validation"
  double kl = 0.0;
  double reconstruction = 0.0;
  double bow = 0.0;
  double policy = 0.0;
  double total = 0.0;
  double perplexity = 0.0;
  double kl_weight = 0.0;
  double accuracy = 0.0;  // classifier runs only
};

std::string to_json_line(const EpochMetrics& m);

struct TrainResult {
  std::vector<EpochMetrics> log;
  std::size_t epochs_run = 0;
  std::size_t steps = 0;      // optimizer steps taken in this run
  std::size_t best_epoch = 0;  // epoch whose parameters were kept
  bool early_stopped = false;
  bool diverged = false;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Minibatch training of a response model with the objective its kind implies:
// base → reconstruction, cvae → reconstruction + annealed KL + BoW,
// reinforced → the hybrid objective once the policy start epoch is reached.
// With early stopping on, keeps the parameters of the epoch with the lowest
// validation loss, where that loss is the variational objective at the target
// KL weight. With patience 0 the final parameters are kept.
TrainResult train_response_model(models::ResponseModel& model, const std::vector<Example>& train,
                                 const std::vector<Example>& validation, const TrainConfig& config,
                                 const models::EmojiClassifier* classifier = nullptr,
                                 const EpochCallback& on_epoch = {});

TrainResult train_classifier(models::EmojiClassifier& classifier, const std::vector<LabeledText>& train,
                             const std::vector<LabeledText>& validation, const TrainConfig& config,
                             const EpochCallback& on_epoch = {});

std::vector<LabeledText> classifier_examples(const std::vector<Example>& examples);

// Teacher-forced loss over a dataset without updates, batch-averaged.
// Latent models use recognition samples from `noise`.
LossBreakdown evaluate_loss(const models::ResponseModel& model, const std::vector<Example>& data, double kl_weight,
                            Rng& noise, std::size_t batch_size = 32);

}  // namespace mojitalk::training
