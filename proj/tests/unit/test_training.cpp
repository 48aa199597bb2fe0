#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "mojitalk/autodiff/optim.hpp"
#include "mojitalk/training/trainer.hpp"
#include "synthetic.hpp"

using namespace mojitalk;
using namespace mojitalk::training;
using ad::Tensor;
using models::Gaussian;
using models::ModelConfig;
using models::ModelKind;
using models::ResponseModel;

namespace {

ModelConfig small_config(std::size_t vocab) {
  ModelConfig c;
  c.vocab_size = vocab;
  c.word_embed = 8;
  c.hidden = 8;
  c.emoji_embed = 6;
  c.emoji_reduced = 4;
  c.latent = 6;
  return c;
}

double kl_value(const std::vector<double>& mq, const std::vector<double>& lq, const std::vector<double>& mp,
                const std::vector<double>& lp) {
  ad::Graph g;
  const ad::Shape s{mq.size()};
  return kl_divergence({g.constant(s, mq), g.constant(s, lq)}, {g.constant(s, mp), g.constant(s, lp)}).item();
}

double log_normal(double x, double mean, double log_var) {
  return -0.5 * (std::log(2 * std::numbers::pi) + log_var + (x - mean) * (x - mean) / std::exp(log_var));
}

std::vector<Example> toy_examples(std::size_t n, std::uint64_t seed, corpus::Vocab* vocab_out = nullptr) {
  const auto pairs = testing::memorization_pairs(n, 4, seed);
  const auto vocab = testing::vocab_for({pairs});
  if (vocab_out) *vocab_out = vocab;
  return encode_examples(pairs, vocab);
}

// Reward that ignores the generation and reports a fixed record.
RewardFn fixed_reward(double reward, double baseline, int rank) {
  return [=](std::span<const int>, const Example&) {
    return RewardRecord{reward, baseline, rank, alpha_coefficient(rank)};
  };
}

}  // namespace

TEST_CASE("KL closed form on simple cases") {
  CHECK(kl_value({0.3, -1}, {0.2, 0.5}, {0.3, -1}, {0.2, 0.5}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(kl_value({0.3, -1}, {0.2, 0.5}, {0.3, -1}, {0.2, 0.5})) < 1e-10);
  CHECK(kl_value({0, 0, 0}, {0, 0, 0}, {1, 1, 1}, {0, 0, 0}) == doctest::Approx(1.5));
}

TEST_CASE("KL is non-negative and vanishes only for identical distributions") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> mq(4), lq(4), mp(4), lp(4);
    for (std::size_t i = 0; i < 4; ++i) {
      mq[i] = rng.uniform(-2, 2);
      lq[i] = rng.uniform(-2, 2);
      mp[i] = rng.uniform(-2, 2);
      lp[i] = rng.uniform(-2, 2);
    }
    CHECK(kl_value(mq, lq, mp, lp) > 0.0);
    CHECK(std::abs(kl_value(mq, lq, mq, lq)) < 1e-12);
  }
}

TEST_CASE("KL matches a Monte Carlo estimate") {
  Rng rng(17);
  for (int pair = 0; pair < 20; ++pair) {
    std::vector<double> mq(8), lq(8), mp(8), lp(8);
    for (std::size_t i = 0; i < 8; ++i) {
      mq[i] = rng.uniform(-0.5, 0.5);
      lq[i] = rng.uniform(-0.5, 0.3);
      mp[i] = rng.uniform(-0.5, 0.5);
      lp[i] = rng.uniform(-0.3, 0.5);
    }
    const std::size_t n = 1000000;
    double acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      double log_ratio = 0.0;
      for (std::size_t i = 0; i < 8; ++i) {
        const double z = mq[i] + std::exp(0.5 * lq[i]) * rng.normal();
        log_ratio += log_normal(z, mq[i], lq[i]) - log_normal(z, mp[i], lp[i]);
      }
      acc += log_ratio;
    }
    CHECK(std::abs(acc / n - kl_value(mq, lq, mp, lp)) < 1e-2);
  }
}

TEST_CASE("reconstruction loss") {
  ad::Graph g;
  const Tensor uniform = g.constant({4, 7}, std::vector<double>(28, 0.0));
  const std::vector<int> targets = {1, 6, 0, 3};
  CHECK(reconstruction_loss(uniform, targets).item() == doctest::Approx(4 * std::log(7.0)));
  CHECK_THROWS_AS(reconstruction_loss(uniform, std::vector<int>{1, 2}), std::invalid_argument);

  std::vector<double> peaked(28, -800.0);
  for (std::size_t t = 0; t < 4; ++t) peaked[t * 7 + targets[t]] = 800.0;
  CHECK(reconstruction_loss(g.constant({4, 7}, peaked), targets).item() == doctest::Approx(0.0));

  Rng rng(2);
  std::vector<double> logits(28);
  for (double& v : logits) v = rng.uniform(-3, 3);
  double brute = 0.0;
  for (std::size_t t = 0; t < 4; ++t) {
    double z = 0.0;
    for (std::size_t k = 0; k < 7; ++k) z += std::exp(logits[t * 7 + k]);
    brute -= std::log(std::exp(logits[t * 7 + targets[t]]) / z);
  }
  CHECK(reconstruction_loss(g.constant({4, 7}, logits), targets).item() == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("bag-of-words loss") {
  ad::Graph g;
  const std::vector<int> targets = {2, 5, 5};
  CHECK(bow_loss(g.constant({9}, std::vector<double>(9, 1.5)), targets).item() == doctest::Approx(3 * std::log(9.0)));
  std::vector<double> peaked(9, -900.0);
  peaked[4] = 900.0;
  CHECK(bow_loss(g.constant({9}, peaked), std::vector<int>{4, 4}).item() == doctest::Approx(0.0));
  CHECK_THROWS_AS(bow_loss(g.constant({9}, peaked), std::vector<int>{}), std::invalid_argument);

  ad::ParameterStore store;
  store.add("f", {9}, {0.1, -0.3, 0.7, 0.2, 0.0, -1.1, 0.4, 0.9, -0.2});
  auto loss = [&](ad::Graph& gr) { return bow_loss(gr.param(store.at(0)), targets); };
  ad::Graph g2;
  const auto grads = g2.backward(loss(g2)).collect(store);
  const auto r = testing::check_gradients(
      store,
      [&] {
        ad::Graph g3;
        return loss(g3).item();
      },
      grads);
  CHECK(r.max_relative_error < 1e-6);
}

TEST_CASE("KL weight schedule") {
  const KlSchedule s{0.5, 6 * 10};
  CHECK(kl_weight(0, s) == 0.0);
  CHECK(kl_weight(30, s) == doctest::Approx(0.25));
  CHECK(kl_weight(60, s) == 0.5);
  CHECK(kl_weight(61, s) == 0.5);
  CHECK(kl_weight(100000, s) == 0.5);
  double last = 0.0;
  for (std::size_t step = 0; step < 200; ++step) {
    const double w = kl_weight(step, s);
    CHECK(w >= last);
    CHECK(w <= 0.5);
    last = w;
  }
  CHECK(kl_weight(0, KlSchedule{0.5, 0}) == 0.5);
}

TEST_CASE("rank-adjusted coefficient") {
  CHECK(alpha_coefficient(1) == 0.0);
  for (int r = 2; r <= 5; ++r) CHECK(alpha_coefficient(r) == 0.5);
  for (int r = 6; r <= 64; ++r) CHECK(alpha_coefficient(r) == 1.0);
  CHECK_THROWS_AS(alpha_coefficient(0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_coefficient(65), std::invalid_argument);
}

TEST_CASE("policy term vanishes without advantage or with rank one") {
  ad::ParameterStore store;
  store.add("w", {3}, {0.2, -0.1, 0.4});
  for (const RewardRecord r : {RewardRecord{0.3, 0.3, 7, 1.0}, RewardRecord{0.9, 0.1, 1, 0.0}}) {
    ad::Graph g;
    const Tensor lp = ad::scale(ad::sum(ad::exp(g.param(store.at(0)))), -1.0);
    const auto grads = g.backward(reinforce_objective(lp, r)).collect(store);
    for (double v : grads[0]) CHECK(v == 0.0);
  }
}

TEST_CASE("one ascent step on the policy term raises the sampled log-probability") {
  corpus::Vocab vocab;
  const auto data = toy_examples(3, 7, &vocab);
  ResponseModel m(ModelKind::cvae, small_config(vocab.size()), 3);
  const Example& ex = data[0];
  const std::vector<int> sampled = {7, 9, 8};
  auto log_prob = [&](ad::Graph& g) {
    const models::Binding b{g, m.params()};
    const auto enc = m.encode_source(b, ex.source);
    const Tensor c = m.condition(enc, m.embed_emoji(b, ex.emoji));
    const Tensor z = g.constant({6}, std::vector<double>(6, 0.2));
    const std::vector<int> framed = {corpus::kSosId, 7, 9, 8, corpus::kEosId};
    const Tensor logits = m.teacher_forced_logits(b, c, &z, enc.memory, framed);
    return ad::scale(reconstruction_loss(logits, std::span<const int>(framed).subspan(1)), -1.0);
  };
  ad::Graph g;
  const Tensor before = log_prob(g);
  const RewardRecord r{0.8, 0.2, 9, alpha_coefficient(9)};
  // Minimizing −J' ascends J'.
  const auto grads = g.backward(ad::scale(reinforce_objective(before, r), -1.0)).collect(m.params());
  ad::AdamState state;
  ad::adam_update(m.params(), grads, state, {1e-3, 5.0});
  ad::Graph g2;
  CHECK(log_prob(g2).item() > before.item());
}

TEST_CASE("with lambda zero the hybrid update equals the variational update bit for bit") {
  corpus::Vocab vocab;
  const auto data = toy_examples(4, 9, &vocab);
  const ResponseModel start(ModelKind::reinforced, small_config(vocab.size()), 8);
  ResponseModel a = start, b = start;
  ReinforceSettings settings;
  settings.lambda = 0.0;
  Rng noise_a(3), noise_b(3), sampler(4);
  const auto ga = cvae_gradients(a, data, 0.3, noise_a);
  const auto gb = reinforced_gradients(b, fixed_reward(0.9, 0.1, 20), data, 0.3, settings, noise_b, sampler);
  ad::AdamState sa, sb;
  ad::adam_update(a.params(), ga.grads, sa);
  ad::adam_update(b.params(), gb.grads, sb);
  for (std::size_t i = 0; i < a.params().size(); ++i) CHECK(a.params().at(i).value == b.params().at(i).value);
  CHECK(ga.loss.total == gb.loss.total);
}

TEST_CASE("rank one contributes exactly zero policy gradient") {
  corpus::Vocab vocab;
  const auto data = toy_examples(4, 10, &vocab);
  const ResponseModel m(ModelKind::reinforced, small_config(vocab.size()), 11);
  ReinforceSettings settings;
  Rng noise_a(5), noise_b(5), sampler(6);
  const auto ref = cvae_gradients(m, data, 0.5, noise_a);
  const auto hyb = reinforced_gradients(m, fixed_reward(0.9, 0.1, 1), data, 0.5, settings, noise_b, sampler);
  CHECK(hyb.generations.size() == data.size());
  CHECK(hyb.grads == ref.grads);
}

TEST_CASE("hybrid gradient is the variational gradient minus the policy gradient") {
  corpus::Vocab vocab;
  const auto data = toy_examples(3, 12, &vocab);
  ResponseModel m(ModelKind::reinforced, small_config(vocab.size()), 13);
  for (auto latent : {PolicyLatent::prior, PolicyLatent::posterior}) {
    CAPTURE(policy_latent_name(latent));
    ReinforceSettings settings;
    settings.decode.max_len = 40;
    settings.latent = latent;
    const RewardRecord fixed{0.7, 0.2, 30, 1.0};
    Rng noise_a(7), noise_b(7), noise_c(7), sampler(8), replay(8);
    const auto var = cvae_gradients(m, data, 0.5, noise_a);
    const auto hyb = reinforced_gradients(m, fixed_reward(0.7, 0.2, 30), data, 0.5, settings, noise_b, sampler);

    // Replay the generation and recompute its Σ log p by teacher forcing.
    ad::Graph g;
    const models::Binding b{g, m.params()};
    std::vector<Tensor> terms;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const Example& ex = data[i];
      const auto enc = m.encode_source(b, ex.source);
      const Tensor c = m.condition(enc, m.embed_emoji(b, ex.emoji));
      const Gaussian q = m.recognition(b, m.encode_response(b, ex.response), c);
      const Tensor zq = models::reparameterize(q, models::standard_normal(6, noise_c));
      const Tensor z =
          latent == PolicyLatent::posterior ? zq : models::reparameterize(m.prior(b, c), models::standard_normal(6, replay));
      const auto replayed = m.decode(b, c, &z, enc.memory, settings.decode, replay);
      CHECK(replayed.ids == hyb.generations[i]);
      std::vector<int> framed = {corpus::kSosId};
      framed.insert(framed.end(), replayed.ids.begin(), replayed.ids.end());
      // A truncated generation never emitted EOS, so its sum has no EOS term.
      if (!replayed.truncated) framed.push_back(corpus::kEosId);
      const Tensor logits = m.teacher_forced_logits(b, c, &z, enc.memory, framed);
      terms.push_back(ad::scale(reconstruction_loss(logits, std::span<const int>(framed).subspan(1)), -1.0));
    }
    const double coef = fixed.alpha * (fixed.reward - fixed.baseline) / static_cast<double>(data.size());
    const auto policy = g.backward(ad::scale(ad::sum(ad::concat(terms)), coef)).collect(m.params());

    double worst = 0.0;
    for (std::size_t p = 0; p < policy.size(); ++p)
      for (std::size_t k = 0; k < policy[p].size(); ++k)
        worst = std::max(worst, std::abs(hyb.grads[p][k] - (var.grads[p][k] - policy[p][k])));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("model losses match finite differences") {
  for (auto kind : {ModelKind::base, ModelKind::cvae, ModelKind::reinforced}) {
    const auto r = testing::check_model_loss(kind, 15, 6);
    INFO(models::kind_name(kind), ": ", r.worst_entry);
    CHECK(r.max_relative_error < 1e-4);
  }
}

TEST_CASE("negative ELBO bounds an importance-sampled negative log-likelihood") {
  corpus::Vocab vocab;
  const auto data = toy_examples(2, 16, &vocab);
  ModelConfig c = small_config(vocab.size());
  c.latent = 3;
  ResponseModel m(ModelKind::cvae, c, 17);
  for (auto& v : m.params().find("decoder_init.latent")->value) v *= 6.0;
  const Example& ex = data[0];
  const std::vector<int> framed = [&] {
    std::vector<int> f{corpus::kSosId};
    f.insert(f.end(), ex.response.begin(), ex.response.end());
    f.push_back(corpus::kEosId);
    return f;
  }();

  ad::Graph g;
  const models::Binding b{g, m.params()};
  const auto enc = m.encode_source(b, ex.source);
  const Tensor cond = m.condition(enc, m.embed_emoji(b, ex.emoji));
  const Gaussian q = m.recognition(b, m.encode_response(b, ex.response), cond);
  const Gaussian p = m.prior(b, cond);
  const double kl = kl_divergence(q, p).item();

  Rng rng(3);
  auto nll_at = [&](const Tensor& z) {
    return reconstruction_loss(m.teacher_forced_logits(b, cond, &z, enc.memory, framed),
                               std::span<const int>(framed).subspan(1))
        .item();
  };
  const std::size_t n = 1000;
  double expected_nll = 0.0;
  std::vector<double> log_w;
  for (std::size_t s = 0; s < n; ++s) {
    const Tensor z = models::reparameterize(q, models::standard_normal(3, rng));
    const double nll = nll_at(z);
    expected_nll += nll;
    double lw = -nll;
    for (std::size_t d = 0; d < 3; ++d)
      lw += log_normal(z[d], p.mean[d], p.log_var[d]) - log_normal(z[d], q.mean[d], q.log_var[d]);
    log_w.push_back(lw);
  }
  expected_nll /= n;
  const double top = *std::max_element(log_w.begin(), log_w.end());
  double sum = 0.0;
  for (double lw : log_w) sum += std::exp(lw - top);
  const double is_nll = -(top + std::log(sum / n));
  CHECK(expected_nll + kl >= is_nll - 1e-2);
}

TEST_CASE("variational objective overfits a five-pair corpus") {
  corpus::Vocab vocab;
  const auto data = toy_examples(5, 18, &vocab);
  ModelConfig c = small_config(vocab.size());
  c.hidden = 16;
  c.word_embed = 16;
  ResponseModel m(ModelKind::cvae, c, 19);
  ad::AdamState state;
  Rng noise(4);
  LossBreakdown last;
  for (int step = 0; step < 2000; ++step) {
    auto g = cvae_gradients(m, data, 0.5, noise);
    last = g.loss;
    ad::adam_update(m.params(), std::move(g.grads), state, {3e-3, 5.0});
  }
  const double per_token = last.reconstruction * static_cast<double>(last.examples) / static_cast<double>(last.tokens);
  CHECK(per_token < 1.0);
  CHECK(last.total == doctest::Approx(last.reconstruction + 0.5 * last.kl + last.bow));
}

TEST_CASE("weight zero drops the KL term from the total") {
  corpus::Vocab vocab;
  const auto data = toy_examples(3, 20, &vocab);
  ResponseModel m(ModelKind::cvae, small_config(vocab.size()), 21);
  Rng noise(1);
  const auto l = cvae_loss(m, data, 0.0, noise);
  CHECK(l.total == doctest::Approx(l.reconstruction + l.bow).epsilon(1e-12));
  CHECK(l.kl >= 0.0);
  CHECK(l.reconstruction >= 0.0);
  CHECK(l.bow >= 0.0);

  // Tied recognition and prior outputs make the KL term vanish.
  for (auto& p : m.params())
    if (p.name.rfind("recognition.l3", 0) == 0 || p.name.rfind("prior.l3", 0) == 0)
      std::fill(p.value.begin(), p.value.end(), 0.0);
  Rng noise2(1);
  CHECK(cvae_loss(m, data, 0.5, noise2).kl == doctest::Approx(0.0));
}

TEST_CASE("training is deterministic and logs every epoch") {
  corpus::Vocab vocab;
  const auto data = toy_examples(12, 22, &vocab);
  const std::vector<Example> train(data.begin(), data.begin() + 9), val(data.begin() + 9, data.end());
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 4;
  cfg.seed = 5;
  cfg.patience = 0;
  auto run = [&] {
    ResponseModel m(ModelKind::cvae, small_config(vocab.size()), 23);
    std::vector<std::string> lines;
    train_response_model(m, train, val, cfg, nullptr, [&](const EpochMetrics& e) { lines.push_back(to_json_line(e)); });
    return std::make_pair(lines, ad::serialize_checkpoint(m.to_checkpoint()));
  };
  const auto a = run(), b = run();
  CHECK(a.first.size() == 6);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  CHECK(a.first[0].find("\"split\":\"train\"") != std::string::npos);
}

TEST_CASE("early stopping keeps the best validation epoch") {
  corpus::Vocab vocab;
  const auto data = toy_examples(10, 24, &vocab);
  const std::vector<Example> train(data.begin(), data.begin() + 6), val(data.begin() + 6, data.end());
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.batch_size = 6;
  cfg.patience = 2;
  cfg.adam.learning_rate = 2e-2;
  ResponseModel m(ModelKind::base, small_config(vocab.size()), 25);
  const TrainResult r = train_response_model(m, train, val, cfg);
  CHECK(r.early_stopped);
  CHECK(r.epochs_run < 40);
  double best = 1e300;
  std::size_t best_epoch = 0;
  for (const auto& e : r.log)
    if (e.split == "validation" && e.total < best) {
      best = e.total;
      best_epoch = e.epoch;
    }
  CHECK(r.best_epoch == best_epoch);
  CHECK(r.epochs_run == best_epoch + 2);
  Rng noise(1);
  CHECK(evaluate_loss(m, val, 0.0, noise).total == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("policy term starts at the configured epoch") {
  corpus::Vocab vocab;
  const auto data = toy_examples(6, 26, &vocab);
  models::ClassifierConfig cc;
  cc.vocab_size = vocab.size();
  cc.embed = 4;
  cc.hidden = 3;
  const models::EmojiClassifier clf(cc, 1);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 3;
  cfg.patience = 0;
  cfg.policy_start_epoch = 2;
  ResponseModel m(ModelKind::reinforced, small_config(vocab.size()), 27);
  const TrainResult r = train_response_model(m, data, {}, cfg, &clf);
  REQUIRE(r.log.size() == 3);
  CHECK(r.log[0].policy == 0.0);
  CHECK(r.log[1].policy == 0.0);
  CHECK(r.log[2].policy != 0.0);
  CHECK_THROWS_AS(train_response_model(m, data, {}, cfg, nullptr), std::invalid_argument);
}

TEST_CASE("classifier reward follows the probability ranking") {
  models::ClassifierConfig cc;
  cc.vocab_size = 10;
  cc.embed = 3;
  cc.hidden = 2;
  models::EmojiClassifier clf(cc, 2);
  auto& bias = clf.params().find("classifier.output.bias")->value;
  bias[4] = 5.0;
  bias[7] = 4.0;
  const Example target{{5}, {6, 7}, 7};
  const RewardRecord r = classifier_reward(clf, std::vector<int>{8, 9}, target);
  CHECK(r.rank == 2);
  CHECK(r.alpha == 0.5);
  CHECK(r.reward == doctest::Approx(clf.probabilities(std::vector<int>{8, 9})[7]));
  CHECK(r.baseline == doctest::Approx(clf.probabilities(std::vector<int>{6, 7})[7]));
  const RewardRecord empty = classifier_reward(clf, std::vector<int>{}, target);
  CHECK(empty.reward == 0.0);
  CHECK(empty.rank == 64);
  CHECK(empty.alpha == 1.0);
}
