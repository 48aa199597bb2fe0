#include "mojitalk/models/response_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mojitalk/corpus/vocab.hpp"
#include "mojitalk/util/io.hpp"

namespace mojitalk::models {

using ad::InitScheme;
using ad::Tensor;

std::string_view kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::base: return "base";
    case ModelKind::cvae: return "cvae";
    case ModelKind::reinforced: return "reinforced";
  }
  return "base";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "base") return ModelKind::base;
  if (name == "cvae") return ModelKind::cvae;
  if (name == "reinforced") return ModelKind::reinforced;
  return std::nullopt;
}

bool has_latent(ModelKind kind) { return kind != ModelKind::base; }

std::map<std::string, std::string> ModelConfig::to_metadata() const {
  return {
      {"model.vocab_size", std::to_string(vocab_size)},   {"model.word_embed", std::to_string(word_embed)},
      {"model.hidden", std::to_string(hidden)},           {"model.emoji_embed", std::to_string(emoji_embed)},
      {"model.emoji_reduced", std::to_string(emoji_reduced)}, {"model.latent", std::to_string(latent)},
      {"model.mlp_hidden", std::to_string(mlp_hidden)},   {"model.num_emojis", std::to_string(num_emojis)},
  };
}

namespace {

std::size_t metadata_size(const std::map<std::string, std::string>& metadata, const std::string& key) {
  const auto it = metadata.find(key);
  if (it == metadata.end()) throw CheckpointMismatch("checkpoint metadata lacks " + key);
  try {
    return static_cast<std::size_t>(std::stoull(it->second));
  } catch (const std::exception&) {
    throw CheckpointMismatch("checkpoint metadata " + key + " is not a size: " + it->second);
  }
}

}  // namespace

ModelConfig ModelConfig::from_metadata(const std::map<std::string, std::string>& metadata) {
  ModelConfig c;
  c.vocab_size = metadata_size(metadata, "model.vocab_size");
  c.word_embed = metadata_size(metadata, "model.word_embed");
  c.hidden = metadata_size(metadata, "model.hidden");
  c.emoji_embed = metadata_size(metadata, "model.emoji_embed");
  c.emoji_reduced = metadata_size(metadata, "model.emoji_reduced");
  c.latent = metadata_size(metadata, "model.latent");
  c.mlp_hidden = metadata_size(metadata, "model.mlp_hidden");
  c.num_emojis = metadata_size(metadata, "model.num_emojis");
  return c;
}

ResponseModel::ResponseModel(ModelKind kind, const ModelConfig& config, std::uint64_t seed)
    : kind_(kind), config_(config) {
  const ModelConfig& c = config_;
  if (c.vocab_size <= corpus::kNumReserved) throw std::invalid_argument("ResponseModel: vocabulary too small");
  if (!c.hidden || !c.word_embed || !c.emoji_embed || !c.emoji_reduced || !c.num_emojis ||
      (has_latent() && !c.latent))
    throw std::invalid_argument("ResponseModel: zero dimension in config");
  Rng rng(seed);
  const std::size_t H = c.hidden;

  word_embedding_ = ad::add_parameter(store_, "word_embedding", {c.vocab_size, c.word_embed}, InitScheme::embedding(), rng);
  emoji_embedding_ =
      ad::add_parameter(store_, "emoji_embedding", {c.num_emojis, c.emoji_embed}, InitScheme::embedding(), rng);
  emoji_dense_ = Dense::create(store_, "emoji_dense", c.emoji_embed, c.emoji_reduced, rng);
  source_encoder_ = BiGru::create(store_, "source_encoder", c.word_embed, H, rng);
  init_condition_ = Dense::create(store_, "decoder_init.condition", c.condition_dim(), H, rng);
  decoder_ = GruCell::create(store_, "decoder.gru", c.word_embed + 2 * H, H, rng);
  attention_ = Attention::create(store_, "decoder.attention", 2 * H, H, rng);
  out_weight_ = ad::add_parameter(store_, "decoder.out.weight", {H, c.vocab_size}, InitScheme::glorot(), rng);
  out_bias_ = ad::add_parameter(store_, "decoder.out.bias", {c.vocab_size}, InitScheme::zeros(), rng);

  if (has_latent()) {
    init_latent_ = ad::add_parameter(store_, "decoder_init.latent", {H, c.latent}, InitScheme::glorot(), rng);
    response_encoder_ = BiGru::create(store_, "response_encoder", c.word_embed, H, rng);
    recognition_ = GaussianNet::create(store_, "recognition", 2 * H + c.condition_dim(), c.mlp_width(), c.latent, rng);
    prior_ = GaussianNet::create(store_, "prior", c.condition_dim(), c.mlp_width(), c.latent, rng);
    bow_ = Dense::create(store_, "bow", c.latent + c.condition_dim(), c.vocab_size, rng);
  }
}

namespace {

void check_ids(std::span<const int> ids, std::size_t vocab, const char* what) {
  if (ids.empty()) throw std::invalid_argument(std::string(what) + ": empty sequence");
  for (int id : ids)
    if (id < 0 || static_cast<std::size_t>(id) >= vocab)
      throw std::invalid_argument(std::string(what) + ": token id " + std::to_string(id) + " outside vocabulary");
}

std::vector<Tensor> embed_tokens(const Binding& b, std::size_t table, std::span<const int> ids) {
  const Tensor t = b(table);
  std::vector<Tensor> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(ad::embedding_lookup(t, id));
  return out;
}

void require_latent(const ResponseModel& m, const char* what) {
  if (!m.has_latent()) throw std::logic_error(std::string(what) + " needs a latent-variable model");
}

}  // namespace

SourceEncoding ResponseModel::encode_source(const Binding& b, std::span<const int> ids) const {
  check_ids(ids, config_.vocab_size, "encode_source");
  const auto inputs = embed_tokens(b, word_embedding_, ids);
  BiGruOutput out = source_encoder_.run(b, inputs);
  return {out.memory, out.summary};
}

Tensor ResponseModel::embed_emoji(const Binding& b, int emoji) const {
  if (emoji < 0 || static_cast<std::size_t>(emoji) >= config_.num_emojis)
    throw std::invalid_argument("embed_emoji: emoji id " + std::to_string(emoji) + " out of range");
  return ad::tanh(emoji_dense_.apply(b, ad::embedding_lookup(b(emoji_embedding_), emoji)));
}

Tensor ResponseModel::condition(const SourceEncoding& source, const Tensor& emoji) const {
  return ad::concat({source.summary, emoji});
}

Tensor ResponseModel::encode_response(const Binding& b, std::span<const int> ids) const {
  require_latent(*this, "encode_response");
  check_ids(ids, config_.vocab_size, "encode_response");
  const auto inputs = embed_tokens(b, word_embedding_, ids);
  return response_encoder_.run(b, inputs).summary;
}

Gaussian ResponseModel::recognition(const Binding& b, const Tensor& response, const Tensor& condition) const {
  require_latent(*this, "recognition");
  return recognition_.apply(b, ad::concat({response, condition}));
}

Gaussian ResponseModel::prior(const Binding& b, const Tensor& condition) const {
  require_latent(*this, "prior");
  return prior_.apply(b, condition);
}

Tensor ResponseModel::initial_state(const Binding& b, const Tensor& condition, const Tensor* z) const {
  Tensor h = init_condition_.apply(b, condition);
  if (z) {
    require_latent(*this, "initial_state with z");
    h = ad::add(h, ad::matmul(b(init_latent_), *z));
  }
  return h;
}

Tensor ResponseModel::decoder_step(const Binding& b, const Tensor& h, int previous, const Tensor& memory,
                                   Tensor& logits) const {
  const Tensor ctx = attention_.context(b, h, memory);
  const Tensor input = ad::concat({ad::embedding_lookup(b(word_embedding_), previous), ctx});
  const Tensor next = decoder_.step(b, input, h);
  logits = ad::add(ad::matmul(next, b(out_weight_)), b(out_bias_));
  return next;
}

Tensor ResponseModel::teacher_forced_logits(const Binding& b, const Tensor& condition, const Tensor* z,
                                            const Tensor& memory, std::span<const int> framed) const {
  if (framed.size() < 2) throw std::invalid_argument("teacher_forced_logits: target needs SOS and EOS framing");
  check_ids(framed, config_.vocab_size, "teacher_forced_logits");
  Tensor h = initial_state(b, condition, z);
  std::vector<Tensor> steps;
  steps.reserve(framed.size() - 1);
  for (std::size_t t = 0; t + 1 < framed.size(); ++t) {
    Tensor logits;
    h = decoder_step(b, h, framed[t], memory, logits);
    steps.push_back(logits);
  }
  return ad::stack(steps);
}

Generation ResponseModel::decode(const Binding& b, const Tensor& condition, const Tensor* z, const Tensor& memory,
                                 const DecodeOptions& options, Rng& rng) const {
  if (options.mode == DecodeMode::sample && !(options.temperature > 0.0))
    throw std::invalid_argument("decode: temperature must be positive");
  Generation gen;
  Tensor h = initial_state(b, condition, z);
  int previous = corpus::kSosId;
  std::vector<Tensor> nll;
  std::vector<double> probs(config_.vocab_size);
  gen.truncated = true;
  for (std::size_t step = 0; step < options.max_len; ++step) {
    Tensor logits;
    h = decoder_step(b, h, previous, memory, logits);
    const auto v = logits.values();
    int next = 0;
    if (options.mode == DecodeMode::greedy) {
      next = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
    } else {
      const double top = *std::max_element(v.begin(), v.end());
      double total = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) total += probs[i] = std::exp((v[i] - top) / options.temperature);
      double u = rng.uniform01() * total;
      next = static_cast<int>(v.size()) - 1;
      for (std::size_t i = 0; i < v.size(); ++i) {
        u -= probs[i];
        if (u < 0.0) {
          next = static_cast<int>(i);
          break;
        }
      }
    }
    nll.push_back(ad::cross_entropy(logits, next));
    if (next == corpus::kEosId) {
      gen.truncated = false;
      break;
    }
    gen.ids.push_back(next);
    previous = next;
  }
  if (nll.empty()) {
    gen.log_prob = b.graph.scalar(0.0);
  } else {
    gen.log_prob = ad::scale(ad::sum(ad::concat(nll)), -1.0);
  }
  return gen;
}

Tensor ResponseModel::bow_logits(const Binding& b, const Tensor& z, const Tensor& condition) const {
  require_latent(*this, "bow_logits");
  return bow_.apply(b, ad::concat({z, condition}));
}

std::size_t ResponseModel::initialize_from(const ResponseModel& other) {
  std::size_t copied = 0;
  for (ad::Parameter& p : store_) {
    const ad::Parameter* src = other.store_.find(p.name);
    if (!src || src->shape != p.shape) continue;
    p.value = src->value;
    ++copied;
  }
  return copied;
}

ad::Checkpoint ResponseModel::to_checkpoint(const std::map<std::string, std::string>& extra) const {
  ad::Checkpoint ck;
  ck.kind = std::string(kind_name(kind_));
  ck.metadata = extra;
  for (const auto& [k, v] : config_.to_metadata()) ck.metadata[k] = v;
  ck.params = store_;
  return ck;
}

ResponseModel ResponseModel::from_checkpoint(const ad::Checkpoint& checkpoint) {
  const auto kind = parse_model_kind(checkpoint.kind);
  if (!kind) throw CheckpointMismatch("checkpoint kind '" + checkpoint.kind + "' is not a response model");
  ResponseModel model(*kind, ModelConfig::from_metadata(checkpoint.metadata), 0);
  load_parameters(model.store_, checkpoint.params);
  return model;
}

void load_parameters(ad::ParameterStore& store, const ad::ParameterStore& saved) {
  if (store.size() != saved.size())
    throw CheckpointMismatch("checkpoint has " + std::to_string(saved.size()) + " parameters, model expects " +
                             std::to_string(store.size()));
  for (ad::Parameter& p : store) {
    const ad::Parameter* src = saved.find(p.name);
    if (!src) throw CheckpointMismatch("checkpoint lacks parameter " + p.name);
    if (src->shape != p.shape)
      throw CheckpointMismatch("parameter " + p.name + " has shape " + ad::shape_to_string(src->shape) +
                               ", model expects " + ad::shape_to_string(p.shape));
    p.value = src->value;
  }
}

}  // namespace mojitalk::models
