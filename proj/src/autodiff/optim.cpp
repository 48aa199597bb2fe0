#include "mojitalk/autodiff/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace mojitalk::ad {

double global_norm(const std::vector<std::vector<double>>& grads) {
  double total = 0.0;
  for (const auto& g : grads)
    for (double v : g) total += v * v;
  return std::sqrt(total);
}

double clip_by_global_norm(std::vector<std::vector<double>>& grads, double clip) {
  if (!(clip > 0.0)) throw std::invalid_argument("clip_by_global_norm: clip must be positive");
  const double norm = global_norm(grads);
  if (norm > clip) {
    const double factor = clip / norm;
    for (auto& g : grads)
      for (double& v : g) v *= factor;
  }
  return norm;
}

UpdateResult adam_update(ParameterStore& params, std::vector<std::vector<double>> grads, AdamState& state,
                         const AdamConfig& config) {
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("adam_update: learning rate must be positive");
  if (grads.size() != params.size()) throw std::invalid_argument("adam_update: gradient count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (grads[i].size() != params.at(i).value.size())
      throw std::invalid_argument("adam_update: gradient shape mismatch for " + params.at(i).name);

  UpdateResult result;
  result.grad_norm = global_norm(grads);
  if (!std::isfinite(result.grad_norm)) {
    result.status = UpdateStatus::diverged;
    return result;
  }
  clip_by_global_norm(grads, config.clip_norm);

  if (state.first_moment.size() != params.size()) {
    state.first_moment.clear();
    state.second_moment.clear();
    for (const Parameter& p : params) {
      state.first_moment.emplace_back(p.value.size(), 0.0);
      state.second_moment.emplace_back(p.value.size(), 0.0);
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::vector<double>& w = params.at(i).value;
    std::vector<double>& m = state.first_moment[i];
    std::vector<double>& v = state.second_moment[i];
    const std::vector<double>& g = grads[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g[j];
      v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      w[j] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
  return result;
}

}  // namespace mojitalk::ad
