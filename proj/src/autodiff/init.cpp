#include "mojitalk/autodiff/init.hpp"

#include <cmath>
#include <stdexcept>

namespace mojitalk::ad {

double glorot_bound(const Shape& shape) {
  double fan_in = 1.0, fan_out = 1.0;
  if (shape.size() == 1) {
    fan_in = fan_out = static_cast<double>(shape[0]);
  } else if (shape.size() >= 2) {
    fan_out = static_cast<double>(shape[0]);
    fan_in = static_cast<double>(shape_size(shape) / shape[0]);
  }
  return std::sqrt(6.0 / (fan_in + fan_out));
}

std::vector<double> init_values(const Shape& shape, const InitScheme& scheme, Rng& rng) {
  if (shape.empty()) throw std::invalid_argument("init_values: empty shape");
  for (std::size_t extent : shape)
    if (extent == 0) throw std::invalid_argument("init_values: non-positive extent in " + shape_to_string(shape));
  std::vector<double> values(shape_size(shape), 0.0);
  switch (scheme.kind) {
    case InitScheme::Kind::zeros:
      break;
    case InitScheme::Kind::glorot_uniform: {
      const double bound = glorot_bound(shape);
      for (double& v : values) v = rng.uniform(-bound, bound);
      break;
    }
    case InitScheme::Kind::uniform:
      if (!(scheme.low <= scheme.high)) throw std::invalid_argument("init_values: uniform bounds reversed");
      for (double& v : values) v = rng.uniform(scheme.low, scheme.high);
      break;
  }
  return values;
}

std::size_t add_parameter(ParameterStore& store, std::string name, Shape shape, const InitScheme& scheme, Rng& rng) {
  auto values = init_values(shape, scheme, rng);
  return store.add(std::move(name), std::move(shape), std::move(values));
}

}  // namespace mojitalk::ad
