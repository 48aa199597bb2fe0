#include "mojitalk/models/layers.hpp"

#include <stdexcept>

namespace mojitalk::models {

using ad::InitScheme;
using ad::Tensor;

Dense Dense::create(ad::ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t out, Rng& rng) {
  Dense d;
  d.in = in;
  d.out = out;
  d.weight = ad::add_parameter(store, prefix + ".weight", {out, in}, InitScheme::glorot(), rng);
  d.bias = ad::add_parameter(store, prefix + ".bias", {out}, InitScheme::zeros(), rng);
  return d;
}

Tensor Dense::apply(const Binding& b, const Tensor& x) const { return ad::add(ad::matmul(b(weight), x), b(bias)); }

GruCell GruCell::create(ad::ParameterStore& store, const std::string& prefix, std::size_t input, std::size_t hidden,
                        Rng& rng) {
  GruCell c;
  c.input = input;
  c.hidden = hidden;
  c.w_input = ad::add_parameter(store, prefix + ".w_input", {3 * hidden, input}, InitScheme::glorot(), rng);
  c.w_gates = ad::add_parameter(store, prefix + ".w_gates", {2 * hidden, hidden}, InitScheme::glorot(), rng);
  c.w_candidate = ad::add_parameter(store, prefix + ".w_candidate", {hidden, hidden}, InitScheme::glorot(), rng);
  c.bias = ad::add_parameter(store, prefix + ".bias", {3 * hidden}, InitScheme::zeros(), rng);
  return c;
}

Tensor GruCell::step(const Binding& b, const Tensor& x, const Tensor& h) const {
  const std::size_t H = hidden;
  const Tensor gx = ad::add(ad::matmul(b(w_input), x), b(bias));
  const Tensor gates = ad::sigmoid(ad::add(ad::slice(gx, 0, 2 * H), ad::matmul(b(w_gates), h)));
  const Tensor z = ad::slice(gates, 0, H);
  const Tensor r = ad::slice(gates, H, H);
  const Tensor candidate =
      ad::tanh(ad::add(ad::slice(gx, 2 * H, H), ad::matmul(b(w_candidate), ad::multiply(r, h))));
  return ad::add(h, ad::multiply(z, ad::sub(candidate, h)));
}

BiGru BiGru::create(ad::ParameterStore& store, const std::string& prefix, std::size_t input, std::size_t hidden,
                    Rng& rng) {
  BiGru g;
  g.forward = GruCell::create(store, prefix + ".fwd", input, hidden, rng);
  g.backward = GruCell::create(store, prefix + ".bwd", input, hidden, rng);
  return g;
}

BiGruOutput BiGru::run(const Binding& b, std::span<const Tensor> inputs) const {
  if (inputs.empty()) throw std::invalid_argument("BiGru: empty input sequence");
  const std::size_t T = inputs.size();
  const Tensor zero = b.graph.constant({hidden()}, std::vector<double>(hidden(), 0.0));
  std::vector<Tensor> fwd(T), bwd(T);
  Tensor h = zero;
  for (std::size_t t = 0; t < T; ++t) fwd[t] = h = forward.step(b, inputs[t], h);
  h = zero;
  for (std::size_t t = T; t-- > 0;) bwd[t] = h = backward.step(b, inputs[t], h);

  BiGruOutput out;
  out.positions.reserve(T);
  for (std::size_t t = 0; t < T; ++t) out.positions.push_back(ad::concat({fwd[t], bwd[t]}));
  out.memory = ad::stack(out.positions);
  out.summary = ad::concat({fwd[T - 1], bwd[0]});
  return out;
}

Attention Attention::create(ad::ParameterStore& store, const std::string& prefix, std::size_t memory_dim,
                            std::size_t query_dim, Rng& rng) {
  Attention a;
  a.weight = ad::add_parameter(store, prefix + ".weight", {memory_dim, query_dim}, InitScheme::glorot(), rng);
  return a;
}

Tensor Attention::weights(const Binding& b, const Tensor& query, const Tensor& memory) const {
  return ad::softmax(ad::matmul(memory, ad::matmul(b(weight), query)));
}

Tensor Attention::context(const Binding& b, const Tensor& query, const Tensor& memory) const {
  return ad::matmul(weights(b, query, memory), memory);
}

GaussianNet GaussianNet::create(ad::ParameterStore& store, const std::string& prefix, std::size_t input,
                                std::size_t hidden, std::size_t latent, Rng& rng) {
  GaussianNet n;
  n.latent = latent;
  n.first = Dense::create(store, prefix + ".l1", input, hidden, rng);
  n.second = Dense::create(store, prefix + ".l2", hidden, hidden, rng);
  n.output = Dense::create(store, prefix + ".l3", hidden, 2 * latent, rng);
  return n;
}

Gaussian GaussianNet::apply(const Binding& b, const Tensor& x) const {
  const Tensor h1 = ad::tanh(first.apply(b, x));
  const Tensor h2 = ad::tanh(second.apply(b, h1));
  const Tensor out = output.apply(b, h2);
  return {ad::slice(out, 0, latent), ad::slice(out, latent, latent)};
}

Tensor reparameterize(const Gaussian& g, std::span<const double> noise) {
  if (noise.size() != g.mean.size())
    throw std::invalid_argument("reparameterize: noise has " + std::to_string(noise.size()) + " entries, latent is " +
                                std::to_string(g.mean.size()));
  const Tensor eps = g.mean.graph()->constant(g.mean.shape(), std::vector<double>(noise.begin(), noise.end()));
  return ad::add(g.mean, ad::multiply(ad::exp(ad::scale(g.log_var, 0.5)), eps));
}

std::vector<double> standard_normal(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

Tensor mean_rows(const Tensor& rows) {
  const std::size_t T = rows.shape().at(0);
  const Tensor w = rows.graph()->constant({T}, std::vector<double>(T, 1.0 / static_cast<double>(T)));
  return ad::matmul(w, rows);
}

Tensor dropout(const Tensor& x, double rate, Rng& rng) {
  if (rate <= 0.0) return x;
  const double keep = 1.0 - rate;
  std::vector<double> mask(x.size());
  for (double& m : mask) m = rng.uniform01() < keep ? 1.0 / keep : 0.0;
  return ad::multiply(x, x.graph()->constant(x.shape(), std::move(mask)));
}

}  // namespace mojitalk::models
