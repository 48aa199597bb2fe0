#pragma once

#include <string>
#include <vector>

#include "mojitalk/autodiff/tensor.hpp"
#include "mojitalk/util/random.hpp"

namespace mojitalk::ad {

struct InitScheme {
  enum class Kind { glorot_uniform, uniform, zeros };
  Kind kind = Kind::glorot_uniform;
  double low = 0.0;
  double high = 0.0;

  static InitScheme glorot() { return {Kind::glorot_uniform, 0.0, 0.0}; }
  static InitScheme uniform(double low, double high) { return {Kind::uniform, low, high}; }
  static InitScheme zeros() { return {Kind::zeros, 0.0, 0.0}; }
  // Word and emoji embedding default.
  static InitScheme embedding() { return uniform(-4e-3, 4e-3); }
};

// Glorot bound sqrt(6 / (fan_in + fan_out)) for a [fan_out, fan_in] matrix.
double glorot_bound(const Shape& shape);

std::vector<double> init_values(const Shape& shape, const InitScheme& scheme, Rng& rng);

// Creates and registers a parameter; returns its store index.
std::size_t add_parameter(ParameterStore& store, std::string name, Shape shape, const InitScheme& scheme, Rng& rng);

}  // namespace mojitalk::ad
