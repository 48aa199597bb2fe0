#include "mojitalk/training/trainer.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace mojitalk::training {

namespace {

// Tags for the derived random streams of one training run.
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kSamplerStream = 3;
constexpr std::uint64_t kValidationStream = 4;
constexpr std::uint64_t kDropoutStream = 5;

std::vector<std::size_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(i)]);
  return order;
}

template <typename T>
std::vector<T> gather(const std::vector<T>& data, const std::vector<std::size_t>& order, std::size_t begin,
                      std::size_t end) {
  std::vector<T> out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) out.push_back(data[order[i]]);
  return out;
}

// Example-weighted running sums of batch losses.
struct Accumulator {
  double kl = 0, reconstruction = 0, bow = 0, policy = 0, total = 0;
  std::size_t tokens = 0, examples = 0;

  void add(const LossBreakdown& l) {
    const double n = static_cast<double>(l.examples);
    kl += l.kl * n;
    reconstruction += l.reconstruction * n;
    bow += l.bow * n;
    policy += l.policy * n;
    total += l.total * n;
    tokens += l.tokens;
    examples += l.examples;
  }

  LossBreakdown mean() const {
    LossBreakdown l;
    const double n = examples ? static_cast<double>(examples) : 1.0;
    l.kl = kl / n;
    l.reconstruction = reconstruction / n;
    l.bow = bow / n;
    l.policy = policy / n;
    l.total = total / n;
    l.tokens = tokens;
    l.examples = examples;
    return l;
  }
};

EpochMetrics to_metrics(std::size_t epoch, const char* split, const LossBreakdown& l, double weight) {
  EpochMetrics m;
  m.epoch = epoch;
  m.split = split;
  m.kl = l.kl;
  m.reconstruction = l.reconstruction;
  m.bow = l.bow;
  m.policy = l.policy;
  m.total = l.total;
  m.kl_weight = weight;
  m.perplexity = l.tokens ? std::exp(l.reconstruction * static_cast<double>(l.examples) / static_cast<double>(l.tokens))
                          : 0.0;
  return m;
}

// Tracks the best validation loss and decides when to stop.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  // Returns true when the epoch improved on the best loss so far.
  bool observe(double loss) {
    if (loss < best_) {
      best_ = loss;
      bad_ = 0;
      return true;
    }
    ++bad_;
    return false;
  }
  bool should_stop() const { return patience_ > 0 && bad_ >= patience_; }

 private:
  std::size_t patience_;
  std::size_t bad_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace

std::string to_json_line(const EpochMetrics& m) {
  nlohmann::ordered_json j;
  j["epoch"] = m.epoch;
  j["split"] = m.split;
  j["kl"] = m.kl;
  j["reconstruction"] = m.reconstruction;
  j["bow"] = m.bow;
  j["policy"] = m.policy;
  j["total"] = m.total;
  j["perplexity"] = m.perplexity;
  j["kl_weight"] = m.kl_weight;
  j["accuracy"] = m.accuracy;
  return j.dump();
}

LossBreakdown evaluate_loss(const models::ResponseModel& model, const std::vector<Example>& data, double weight,
                            Rng& noise, std::size_t batch_size) {
  if (data.empty()) throw std::invalid_argument("evaluate_loss: empty dataset");
  if (batch_size == 0) batch_size = data.size();
  Accumulator acc;
  for (std::size_t begin = 0; begin < data.size(); begin += batch_size) {
    const std::span<const Example> batch(data.data() + begin, std::min(batch_size, data.size() - begin));
    acc.add(model.has_latent() ? cvae_loss(model, batch, weight, noise) : base_loss(model, batch));
  }
  LossBreakdown l = acc.mean();
  l.kl_weight = weight;
  return l;
}

TrainResult train_response_model(models::ResponseModel& model, const std::vector<Example>& train,
                                 const std::vector<Example>& validation, const TrainConfig& config,
                                 const models::EmojiClassifier* classifier, const EpochCallback& on_epoch) {
  if (train.empty()) throw std::invalid_argument("train_response_model: empty training set");
  if (config.batch_size == 0) throw std::invalid_argument("train_response_model: batch size must be positive");
  if (config.lambda < 0.0) throw std::invalid_argument("train_response_model: lambda must be non-negative");
  if (!(config.kl_target > 0.0 && config.kl_target <= 1.0))
    throw std::invalid_argument("train_response_model: KL target must lie in (0, 1]");
  const bool reinforced = model.kind() == models::ModelKind::reinforced;
  if (reinforced && !classifier && config.lambda != 0.0)
    throw std::invalid_argument("train_response_model: reinforced training needs a classifier");

  const std::size_t steps_per_epoch = (train.size() + config.batch_size - 1) / config.batch_size;
  const KlSchedule schedule{config.kl_target, config.kl_anneal_epochs * steps_per_epoch};
  Rng shuffle_rng(mix_seed(config.seed, kShuffleStream));
  Rng noise(mix_seed(config.seed, kNoiseStream));
  Rng sampler(mix_seed(config.seed, kSamplerStream));
  const RewardFn reward = classifier ? classifier_reward_fn(*classifier) : RewardFn{};
  ReinforceSettings settings;
  settings.lambda = config.lambda;
  settings.decode = {models::DecodeMode::sample, config.max_decode_len, config.temperature};
  settings.latent = config.policy_latent;

  ad::AdamState adam;
  TrainResult result;
  EarlyStopper stopper(config.patience);
  ad::ParameterStore best = model.params();
  std::size_t global_step = config.start_step;

  for (std::size_t e = 0; e < config.epochs && !result.diverged; ++e) {
    const std::size_t epoch = config.start_epoch + e + 1;
    settings.policy_active = reinforced && config.start_epoch + e >= config.policy_start_epoch;
    const auto order = shuffled(train.size(), shuffle_rng);
    Accumulator acc;
    double weight = 0.0;
    for (std::size_t begin = 0; begin < train.size(); begin += config.batch_size) {
      const auto batch = gather(train, order, begin, std::min(begin + config.batch_size, train.size()));
      weight = model.has_latent() ? kl_weight(global_step, schedule) : 0.0;
      BatchGradients g;
      switch (model.kind()) {
        case models::ModelKind::base: g = base_gradients(model, batch); break;
        case models::ModelKind::cvae: g = cvae_gradients(model, batch, weight, noise); break;
        case models::ModelKind::reinforced:
          g = reinforced_gradients(model, reward, batch, weight, settings, noise, sampler);
          break;
      }
      const ad::UpdateResult update = ad::adam_update(model.params(), std::move(g.grads), adam, config.adam);
      if (update.status == ad::UpdateStatus::diverged || !std::isfinite(g.loss.total)) {
        result.diverged = true;
        break;
      }
      acc.add(g.loss);
      ++global_step;
      ++result.steps;
    }
    if (result.diverged) break;
    ++result.epochs_run;

    const EpochMetrics train_metrics = to_metrics(epoch, "train", acc.mean(), weight);
    result.log.push_back(train_metrics);
    if (on_epoch) on_epoch(train_metrics);

    if (validation.empty()) {
      result.best_epoch = epoch;
      continue;
    }
    Rng val_noise(mix_seed(config.seed, kValidationStream));
    const double val_weight = model.has_latent() ? config.kl_target : 0.0;
    LossBreakdown val = evaluate_loss(model, validation, val_weight, val_noise, config.batch_size);
    const EpochMetrics val_metrics = to_metrics(epoch, "validation", val, val_weight);
    result.log.push_back(val_metrics);
    if (on_epoch) on_epoch(val_metrics);
    if (stopper.observe(val.total)) {
      best = model.params();
      result.best_epoch = epoch;
    }
    if (stopper.should_stop()) {
      result.early_stopped = true;
      break;
    }
  }
  if (config.patience > 0 && !validation.empty() && result.best_epoch != 0) model.params() = best;
  return result;
}

std::vector<LabeledText> classifier_examples(const std::vector<Example>& examples) {
  std::vector<LabeledText> out;
  for (const Example& ex : examples)
    if (!ex.response.empty()) out.push_back({ex.response, ex.emoji});
  return out;
}

TrainResult train_classifier(models::EmojiClassifier& classifier, const std::vector<LabeledText>& train,
                             const std::vector<LabeledText>& validation, const TrainConfig& config,
                             const EpochCallback& on_epoch) {
  if (train.empty()) throw std::invalid_argument("train_classifier: empty training set");
  if (config.batch_size == 0) throw std::invalid_argument("train_classifier: batch size must be positive");
  Rng shuffle_rng(mix_seed(config.seed, kShuffleStream));
  Rng dropout(mix_seed(config.seed, kDropoutStream));
  ad::AdamState adam;
  TrainResult result;
  EarlyStopper stopper(config.patience);
  ad::ParameterStore best = classifier.params();

  for (std::size_t e = 0; e < config.epochs; ++e) {
    const std::size_t epoch = config.start_epoch + e + 1;
    const auto order = shuffled(train.size(), shuffle_rng);
    double loss = 0.0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < train.size(); begin += config.batch_size) {
      const auto batch = gather(train, order, begin, std::min(begin + config.batch_size, train.size()));
      ClassifierBatch g = classifier_gradients(classifier, batch, &dropout);
      const auto update = ad::adam_update(classifier.params(), std::move(g.grads), adam, config.adam);
      if (update.status == ad::UpdateStatus::diverged || !std::isfinite(g.loss)) {
        result.diverged = true;
        break;
      }
      loss += g.loss * static_cast<double>(batch.size());
      correct += g.correct;
      ++result.steps;
    }
    if (result.diverged) break;
    ++result.epochs_run;

    EpochMetrics m;
    m.epoch = epoch;
    m.split = "train";
    m.total = loss / static_cast<double>(train.size());
    m.accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
    result.log.push_back(m);
    if (on_epoch) on_epoch(m);

    if (validation.empty()) {
      result.best_epoch = epoch;
      continue;
    }
    double val_loss = 0.0;
    std::size_t val_correct = 0;
    for (std::size_t begin = 0; begin < validation.size(); begin += config.batch_size) {
      const std::span<const LabeledText> batch(validation.data() + begin,
                                               std::min(config.batch_size, validation.size() - begin));
      ad::Graph g;
      const models::Binding b{g, classifier.params()};
      for (const LabeledText& ex : batch) {
        const ad::Tensor logits = classifier.logits(b, ex.ids);
        const auto v = logits.values();
        if (std::max_element(v.begin(), v.end()) - v.begin() == ex.label) ++val_correct;
        val_loss += ad::cross_entropy(logits, ex.label).item();
      }
    }
    EpochMetrics vm;
    vm.epoch = epoch;
    vm.split = "validation";
    vm.total = val_loss / static_cast<double>(validation.size());
    vm.accuracy = static_cast<double>(val_correct) / static_cast<double>(validation.size());
    result.log.push_back(vm);
    if (on_epoch) on_epoch(vm);
    if (stopper.observe(vm.total)) {
      best = classifier.params();
      result.best_epoch = epoch;
    }
    if (stopper.should_stop()) {
      result.early_stopped = true;
      break;
    }
  }
  if (config.patience > 0 && !validation.empty() && result.best_epoch != 0) classifier.params() = best;
  return result;
}

}  // namespace mojitalk::training
