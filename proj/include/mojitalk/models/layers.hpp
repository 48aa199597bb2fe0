#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mojitalk/autodiff/init.hpp"
#include "mojitalk/autodiff/tensor.hpp"
#include "mojitalk/util/random.hpp"

namespace mojitalk::models {

// A graph together with the store whose parameters the layers reference.
struct Binding {
  ad::Graph& graph;
  const ad::ParameterStore& store;

  ad::Tensor operator()(std::size_t index) const { return graph.param(store.at(index)); }
};

// y = W x + b with W stored [out, in].
struct Dense {
  std::size_t weight = 0;
  std::size_t bias = 0;
  std::size_t in = 0;
  std::size_t out = 0;

  static Dense create(ad::ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t out, Rng& rng);
  ad::Tensor apply(const Binding& b, const ad::Tensor& x) const;
};

// Gated recurrent unit:
//   z = σ(W_z x + U_z h + b_z), r = σ(W_r x + U_r h + b_r)
//   h̃ = tanh(W_h x + U_h (r ⊙ h) + b_h), h' = (1 − z) ⊙ h + z ⊙ h̃
// The input weights of all three gates share one [3H, in] matrix.
struct GruCell {
  std::size_t w_input = 0;      // [3H, in]
  std::size_t w_gates = 0;      // [2H, H] for z and r
  std::size_t w_candidate = 0;  // [H, H]
  std::size_t bias = 0;         // [3H]
  std::size_t input = 0;
  std::size_t hidden = 0;

  static GruCell create(ad::ParameterStore& store, const std::string& prefix, std::size_t input, std::size_t hidden,
                        Rng& rng);
  ad::Tensor step(const Binding& b, const ad::Tensor& x, const ad::Tensor& h) const;
};

struct BiGruOutput {
  std::vector<ad::Tensor> positions;  // [2H] per input position: forward state then backward state
  ad::Tensor memory;                  // [T, 2H]
  ad::Tensor summary;                 // [2H]: final forward and final backward states
};

struct BiGru {
  GruCell forward;
  GruCell backward;

  static BiGru create(ad::ParameterStore& store, const std::string& prefix, std::size_t input, std::size_t hidden,
                      Rng& rng);
  std::size_t hidden() const { return forward.hidden; }
  BiGruOutput run(const Binding& b, std::span<const ad::Tensor> inputs) const;
};

// Luong "general" attention: score_t = mᵀ_t W h over memory rows m_t.
struct Attention {
  std::size_t weight = 0;  // [2H, H]

  static Attention create(ad::ParameterStore& store, const std::string& prefix, std::size_t memory_dim,
                          std::size_t query_dim, Rng& rng);
  ad::Tensor weights(const Binding& b, const ad::Tensor& query, const ad::Tensor& memory) const;
  ad::Tensor context(const Binding& b, const ad::Tensor& query, const ad::Tensor& memory) const;
};

struct Gaussian {
  ad::Tensor mean;
  ad::Tensor log_var;
};

// Three dense layers, tanh on the first two; the last one emits [mean; log_var].
struct GaussianNet {
  Dense first;
  Dense second;
  Dense output;
  std::size_t latent = 0;

  static GaussianNet create(ad::ParameterStore& store, const std::string& prefix, std::size_t input,
                            std::size_t hidden, std::size_t latent, Rng& rng);
  Gaussian apply(const Binding& b, const ad::Tensor& x) const;
};

// z = mean + exp(log_var / 2) ⊙ noise.
ad::Tensor reparameterize(const Gaussian& g, std::span<const double> noise);

std::vector<double> standard_normal(std::size_t n, Rng& rng);

// Mean over the rows of a [T, d] tensor.
ad::Tensor mean_rows(const ad::Tensor& rows);

// Inverted dropout with a freshly drawn mask.
ad::Tensor dropout(const ad::Tensor& x, double rate, Rng& rng);

}  // namespace mojitalk::models
