#include "mojitalk/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mojitalk::eval {

using ad::Tensor;

namespace {

std::vector<int> framed(const std::vector<int>& response) {
  std::vector<int> f{corpus::kSosId};
  f.insert(f.end(), response.begin(), response.end());
  f.push_back(corpus::kEosId);
  return f;
}

}  // namespace

double perplexity_from_nll(double nll, std::size_t tokens) {
  if (tokens == 0) throw std::invalid_argument("perplexity_from_nll: no tokens");
  return std::exp(nll / static_cast<double>(tokens));
}

PerplexityResult perplexity(const models::ResponseModel& model, const std::vector<training::Example>& data,
                            std::size_t prior_samples, std::uint64_t seed) {
  if (data.empty()) throw std::invalid_argument("perplexity: empty dataset");
  const std::size_t samples = model.has_latent() ? std::max<std::size_t>(prior_samples, 1) : 1;
  Rng noise(seed);
  PerplexityResult r;
  r.prior_samples = model.has_latent() ? samples : 0;
  for (const training::Example& ex : data) {
    const auto f = framed(ex.response);
    const std::span<const int> targets = std::span<const int>(f).subspan(1);
    ad::Graph g;
    const models::Binding b{g, model.params()};
    const auto enc = model.encode_source(b, ex.source);
    const Tensor c = model.condition(enc, model.embed_emoji(b, ex.emoji));
    double nll = 0.0;
    if (!model.has_latent()) {
      nll = training::reconstruction_loss(model.teacher_forced_logits(b, c, nullptr, enc.memory, f), targets).item();
    } else {
      const models::Gaussian prior = model.prior(b, c);
      for (std::size_t s = 0; s < samples; ++s) {
        const Tensor z = models::reparameterize(prior, models::standard_normal(model.config().latent, noise));
        nll += training::reconstruction_loss(model.teacher_forced_logits(b, c, &z, enc.memory, f), targets).item();
      }
      nll /= static_cast<double>(samples);
    }
    r.nll += nll;
    r.tokens += targets.size();
  }
  r.perplexity = perplexity_from_nll(r.nll, r.tokens);
  return r;
}

double topk_accuracy(const std::vector<std::vector<double>>& probabilities, const std::vector<int>& targets,
                     std::size_t k) {
  if (probabilities.size() != targets.size()) throw std::invalid_argument("topk_accuracy: size mismatch");
  if (targets.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < targets.size(); ++i)
    if (static_cast<std::size_t>(models::label_rank(probabilities[i], targets[i])) <= k) ++hits;
  return static_cast<double>(hits) / static_cast<double>(targets.size());
}

EmojiAccuracy emoji_accuracy(const models::EmojiClassifier& classifier, const std::vector<std::vector<int>>& responses,
                             const std::vector<int>& targets) {
  if (responses.size() != targets.size()) throw std::invalid_argument("emoji_accuracy: size mismatch");
  EmojiAccuracy acc;
  if (responses.empty()) return acc;
  std::size_t top1 = 0, top5 = 0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (responses[i].empty()) continue;
    const int rank = models::label_rank(classifier.probabilities(responses[i]), targets[i]);
    top1 += rank <= 1;
    top5 += rank <= 5;
  }
  acc.top1 = static_cast<double>(top1) / static_cast<double>(responses.size());
  acc.top5 = static_cast<double>(top5) / static_cast<double>(responses.size());
  return acc;
}

template <typename Token>
std::optional<double> type_token_ratio(const std::vector<std::vector<Token>>& responses, std::size_t n) {
  if (n == 0) throw std::invalid_argument("type_token_ratio: n must be positive");
  std::set<std::vector<Token>> types;
  std::size_t total = 0;
  for (const auto& r : responses) {
    if (r.size() < n) continue;
    for (std::size_t i = 0; i + n <= r.size(); ++i) {
      types.emplace(r.begin() + static_cast<std::ptrdiff_t>(i), r.begin() + static_cast<std::ptrdiff_t>(i + n));
      ++total;
    }
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(types.size()) / static_cast<double>(total);
}

template std::optional<double> type_token_ratio(const std::vector<std::vector<int>>&, std::size_t);
template std::optional<double> type_token_ratio(const std::vector<std::vector<std::string>>&, std::size_t);

Generator model_generator(const models::ResponseModel& model, const models::EmojiClassifier& classifier,
                          const models::GenerationPolicy& policy, std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [&model, &classifier, policy, rng](std::span<const int> source, int emoji) {
    return models::generate_response(model, classifier, source, emoji, policy, *rng);
  };
}

std::vector<std::vector<int>> unique_sources(const std::vector<training::Example>& data) {
  std::vector<std::vector<int>> out;
  std::set<std::vector<int>> seen;
  for (const auto& ex : data)
    if (seen.insert(ex.source).second) out.push_back(ex.source);
  return out;
}

std::vector<int> emojis_by_frequency(const corpus::EmojiInventory& inventory) {
  std::vector<int> ids(inventory.size());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) { return inventory.at(a).count > inventory.at(b).count; });
  return ids;
}

std::vector<ControllabilityRow> controllability_report(const Generator& generate,
                                                       const models::EmojiClassifier& classifier,
                                                       const std::vector<std::vector<int>>& sources,
                                                       const std::vector<int>& emojis) {
  std::vector<ControllabilityRow> rows;
  rows.reserve(emojis.size());
  for (int emoji : emojis) {
    std::vector<std::vector<int>> responses;
    responses.reserve(sources.size());
    for (const auto& source : sources) responses.push_back(generate(source, emoji));
    const EmojiAccuracy acc = emoji_accuracy(classifier, responses, std::vector<int>(sources.size(), emoji));
    rows.push_back({emoji, acc.top1, acc.top5, sources.size()});
  }
  return rows;
}

std::string controllability_tsv(const std::vector<ControllabilityRow>& rows, const corpus::EmojiInventory& inventory) {
  std::ostringstream out;
  out << "emoji_id\temoji\tname\ttop1\ttop5\tsources\n";
  char buf[64];
  for (const auto& r : rows) {
    const auto& e = inventory.at(r.emoji);
    std::snprintf(buf, sizeof buf, "%.4f\t%.4f", r.top1, r.top5);
    out << r.emoji << '\t' << e.emoji << '\t' << e.name << '\t' << buf << '\t' << r.sources << '\n';
  }
  return out.str();
}

std::string controllability_bars(const std::vector<ControllabilityRow>& rows, const corpus::EmojiInventory& inventory,
                                 std::size_t width) {
  std::ostringstream out;
  char buf[32];
  for (const auto& r : rows) {
    const auto filled = static_cast<std::size_t>(std::lround(r.top5 * static_cast<double>(width)));
    std::snprintf(buf, sizeof buf, "%5.1f%%", 100.0 * r.top5);
    out << inventory.at(r.emoji).emoji << ' ' << std::string(filled, '#') << std::string(width - filled, '.') << ' '
        << buf << '\n';
  }
  return out.str();
}

EvalReport evaluate(const models::ResponseModel& model, const models::EmojiClassifier& classifier,
                    const std::vector<training::Example>& data, const corpus::Vocab& vocab, const EvalConfig& config) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty dataset");
  EvalReport report;
  report.model_kind = std::string(models::kind_name(model.kind()));
  report.examples = data.size();
  report.perplexity = perplexity(model, data, config.prior_samples, mix_seed(config.seed, 1));

  const Generator generate = model_generator(model, classifier, config.policy, mix_seed(config.seed, 2));
  std::vector<std::vector<int>> generated, targets;
  std::vector<int> emojis;
  for (const auto& ex : data) {
    generated.push_back(generate(ex.source, ex.emoji));
    targets.push_back(ex.response);
    emojis.push_back(ex.emoji);
  }
  report.accuracy = emoji_accuracy(classifier, generated, emojis);
  for (std::size_t n = 1; n <= 3; ++n) {
    report.ttr[n - 1] = type_token_ratio(generated, n);
    report.target_ttr[n - 1] = type_token_ratio(targets, n);
  }
  for (std::size_t i = 0; i < data.size() && i < config.max_samples; ++i)
    report.samples.push_back({vocab.decode(data[i].source), data[i].emoji, vocab.decode(targets[i]),
                              vocab.decode(generated[i])});
  return report;
}

namespace {

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string optional_text(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["model_kind"] = model_kind;
  j["examples"] = examples;
  j["perplexity"] = perplexity.perplexity;
  j["nll"] = perplexity.nll;
  j["tokens"] = perplexity.tokens;
  j["prior_samples"] = perplexity.prior_samples;
  j["top1"] = accuracy.top1;
  j["top5"] = accuracy.top5;
  for (int n = 1; n <= 3; ++n) {
    j["ttr" + std::to_string(n)] = optional_json(ttr[n - 1]);
    j["target_ttr" + std::to_string(n)] = optional_json(target_ttr[n - 1]);
  }
  auto& s = j["samples"] = nlohmann::ordered_json::array();
  for (const auto& sample : samples) {
    s.push_back({{"source", corpus::join_tokens(sample.source)},
                 {"emoji_id", sample.emoji},
                 {"target", corpus::join_tokens(sample.target)},
                 {"generated", corpus::join_tokens(sample.generated)}});
  }
  return j.dump(2) + "\n";
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  char buf[128];
  out << "model: " << model_kind << " (" << examples << " examples)\n";
  std::snprintf(buf, sizeof buf, "perplexity: %.4f (%zu tokens, %zu prior samples)\n", perplexity.perplexity,
                perplexity.tokens, perplexity.prior_samples);
  out << buf;
  std::snprintf(buf, sizeof buf, "emoji accuracy: top-1 %.4f  top-5 %.4f\n", accuracy.top1, accuracy.top5);
  out << buf;
  out << "type-token ratio  generated: " << optional_text(ttr[0]) << ' ' << optional_text(ttr[1]) << ' '
      << optional_text(ttr[2]) << "  human: " << optional_text(target_ttr[0]) << ' ' << optional_text(target_ttr[1])
      << ' ' << optional_text(target_ttr[2]) << '\n';
  for (const auto& s : samples) {
    out << "\nsource:    " << corpus::join_tokens(s.source) << "\nemoji:     " << s.emoji
        << "\ntarget:    " << corpus::join_tokens(s.target) << "\ngenerated: " << corpus::join_tokens(s.generated)
        << '\n';
  }
  return out.str();
}

}  // namespace mojitalk::eval
