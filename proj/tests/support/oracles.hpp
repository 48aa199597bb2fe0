#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "mojitalk/models/response_model.hpp"

namespace mojitalk::testing {

// One autodiff op applied to random inputs of the given shapes.
struct OpCase {
  std::string name;
  std::vector<ad::Shape> shapes;
  std::function<ad::Tensor(ad::Graph&, std::vector<ad::Tensor>&)> op;
};

std::vector<OpCase> op_cases();

// Finite-difference check of an op, projected onto fixed random weights so
// every output element reaches the scalar loss.
GradCheckResult check_op(const OpCase& c, std::uint64_t seed = 42);

// Finite-difference check of a model kind's training loss (H=8, D=6,
// vocab=20) on a random two-example batch. The reinforced loss uses a fixed
// α(R − r). max_per_param = 0 checks every entry.
GradCheckResult check_model_loss(models::ModelKind kind, std::uint64_t seed, std::size_t max_per_param = 0);

}  // namespace mojitalk::testing
