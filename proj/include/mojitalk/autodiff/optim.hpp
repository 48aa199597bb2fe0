#pragma once

#include <cstddef>
#include <vector>

#include "mojitalk/autodiff/tensor.hpp"

namespace mojitalk::ad {

struct AdamConfig {
  double learning_rate = 1e-3;
  double clip_norm = 5.0;  // global-norm clip threshold
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::size_t step = 0;
};

enum class UpdateStatus { applied, diverged };

struct UpdateResult {
  UpdateStatus status = UpdateStatus::applied;
  double grad_norm = 0.0;  // before clipping
};

double global_norm(const std::vector<std::vector<double>>& grads);

// Scales grads in place so their global norm is at most clip. Returns the
// norm before scaling.
double clip_by_global_norm(std::vector<std::vector<double>>& grads, double clip);

// One bias-corrected Adam step over every parameter of the store. A NaN or
// infinite gradient leaves parameters and state untouched and reports
// divergence.
UpdateResult adam_update(ParameterStore& params, std::vector<std::vector<double>> grads, AdamState& state,
                         const AdamConfig& config = {});

}  // namespace mojitalk::ad
