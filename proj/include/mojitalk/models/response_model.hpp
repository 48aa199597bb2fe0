#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mojitalk/autodiff/checkpoint.hpp"
#include "mojitalk/models/layers.hpp"

namespace mojitalk::models {

enum class ModelKind { base, cvae, reinforced };

std::string_view kind_name(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);
bool has_latent(ModelKind kind);

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t word_embed = 128;
  std::size_t hidden = 128;
  std::size_t emoji_embed = 128;
  std::size_t emoji_reduced = 12;
  std::size_t latent = 268;
  std::size_t mlp_hidden = 0;  // 0 means the latent size
  std::size_t num_emojis = 64;

  std::size_t condition_dim() const { return 2 * hidden + emoji_reduced; }
  std::size_t mlp_width() const { return mlp_hidden ? mlp_hidden : latent; }

  std::map<std::string, std::string> to_metadata() const;
  static ModelConfig from_metadata(const std::map<std::string, std::string>& metadata);
};

struct SourceEncoding {
  ad::Tensor memory;   // [T, 2H]
  ad::Tensor summary;  // v_o, [2H]
};

enum class DecodeMode { greedy, sample };

struct DecodeOptions {
  DecodeMode mode = DecodeMode::greedy;
  std::size_t max_len = 30;
  double temperature = 1.0;
};

struct Generation {
  std::vector<int> ids;  // emitted tokens without the closing EOS
  ad::Tensor log_prob;   // Σ_t log p(y_t | ...) over emitted steps, EOS included when produced
  bool truncated = false;
};

// Attention seq2seq responder, optionally with the latent-variable parts
// (response encoder, recognition and prior networks, bag-of-words head).
// Word embeddings are shared by the encoders and the decoder.
class ResponseModel {
 public:
  ResponseModel() = default;
  ResponseModel(ModelKind kind, const ModelConfig& config, std::uint64_t seed);

  ModelKind kind() const { return kind_; }
  const ModelConfig& config() const { return config_; }
  bool has_latent() const { return models::has_latent(kind_); }
  ad::ParameterStore& params() { return store_; }
  const ad::ParameterStore& params() const { return store_; }

  SourceEncoding encode_source(const Binding& b, std::span<const int> ids) const;
  // v_e = tanh(W e + b) for the emoji's embedding row e.
  ad::Tensor embed_emoji(const Binding& b, int emoji) const;
  // c = [v_o; v_e].
  ad::Tensor condition(const SourceEncoding& source, const ad::Tensor& emoji) const;
  // Summary vector x of a response (ids without SOS/EOS framing).
  ad::Tensor encode_response(const Binding& b, std::span<const int> ids) const;
  Gaussian recognition(const Binding& b, const ad::Tensor& response, const ad::Tensor& condition) const;
  Gaussian prior(const Binding& b, const ad::Tensor& condition) const;

  // Decoder initial state: W_c c + W_z z + b, the z term omitted when z is null.
  ad::Tensor initial_state(const Binding& b, const ad::Tensor& condition, const ad::Tensor* z) const;

  // framed = SOS, x_1..x_n, EOS. Returns [n + 1, V] logits predicting framed[1..].
  ad::Tensor teacher_forced_logits(const Binding& b, const ad::Tensor& condition, const ad::Tensor* z,
                                   const ad::Tensor& memory, std::span<const int> framed) const;

  Generation decode(const Binding& b, const ad::Tensor& condition, const ad::Tensor* z, const ad::Tensor& memory,
                    const DecodeOptions& options, Rng& rng) const;

  // Order-free token logits f([z; c]) over the vocabulary.
  ad::Tensor bow_logits(const Binding& b, const ad::Tensor& z, const ad::Tensor& condition) const;

  // Copies every parameter that `other` holds under the same name and shape.
  // Returns the number copied.
  std::size_t initialize_from(const ResponseModel& other);

  ad::Checkpoint to_checkpoint(const std::map<std::string, std::string>& extra = {}) const;
  static ResponseModel from_checkpoint(const ad::Checkpoint& checkpoint);

 private:
  ad::Tensor decoder_step(const Binding& b, const ad::Tensor& h, int previous, const ad::Tensor& memory,
                          ad::Tensor& logits) const;

  ModelKind kind_ = ModelKind::base;
  ModelConfig config_;
  ad::ParameterStore store_;

  std::size_t word_embedding_ = 0;
  std::size_t emoji_embedding_ = 0;
  Dense emoji_dense_;
  BiGru source_encoder_;
  Dense init_condition_;
  std::size_t init_latent_ = 0;
  GruCell decoder_;
  Attention attention_;
  std::size_t out_weight_ = 0;  // [H, V]
  std::size_t out_bias_ = 0;

  BiGru response_encoder_;
  GaussianNet recognition_;
  GaussianNet prior_;
  Dense bow_;
};

// Copies parameter values from a checkpoint into a store built with the same
// architecture. Every store parameter must be present with a matching shape.
void load_parameters(ad::ParameterStore& store, const ad::ParameterStore& saved);

}  // namespace mojitalk::models
