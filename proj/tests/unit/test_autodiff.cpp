#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "oracles.hpp"
#include "mojitalk/autodiff/checkpoint.hpp"
#include "mojitalk/autodiff/init.hpp"
#include "mojitalk/autodiff/optim.hpp"
#include "mojitalk/autodiff/tensor.hpp"

using namespace mojitalk;
using namespace mojitalk::ad;

namespace {

std::vector<double> random_values(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("matmul with identity returns the other operand") {
  Graph g;
  Rng rng(1);
  Tensor eye = g.constant({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  auto values = random_values(9, rng);
  Tensor a = g.constant({3, 3}, values);
  Tensor out = matmul(eye, a);
  for (std::size_t i = 0; i < 9; ++i) CHECK(out[i] == values[i]);
}

TEST_CASE("softmax of equal logits is uniform") {
  Graph g;
  Tensor s = softmax(g.constant({4}, {0, 0, 0, 0}));
  for (double v : s.values()) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("cross entropy of uniform logits equals log vocab size") {
  Graph g;
  Tensor logits = g.constant({20000}, std::vector<double>(20000, 0.0));
  CHECK(cross_entropy(logits, 1234).item() == doctest::Approx(std::log(20000.0)).epsilon(1e-12));
  CHECK(std::log(20000.0) == doctest::Approx(9.9035).epsilon(1e-4));
}

TEST_CASE("cross entropy is stable for large logits") {
  Graph g;
  Tensor logits = g.constant({3}, {1000.0, 0.0, -1000.0});
  CHECK(cross_entropy(logits, 0).item() == doctest::Approx(0.0));
  CHECK(std::isfinite(cross_entropy(logits, 2).item()));
}

TEST_CASE("softmax rows are positive and sum to one") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Graph g;
    const std::size_t rows = 1 + rng.uniform_int(4), cols = 1 + rng.uniform_int(30);
    Tensor s = softmax(g.constant({rows, cols}, random_values(rows * cols, rng, -30, 30)));
    for (std::size_t r = 0; r < rows; ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        CHECK(s[r * cols + c] > 0.0);
        total += s[r * cols + c];
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("shape mismatch names the op and both shapes") {
  Graph g;
  Tensor a = g.constant({2, 3}, std::vector<double>(6, 1.0));
  Tensor b = g.constant({4}, std::vector<double>(4, 1.0));
  try {
    matmul(a, b);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("[2,3]") != std::string::npos);
    CHECK(msg.find("[4]") != std::string::npos);
  }
  CHECK_THROWS_AS(add(a, g.constant({3, 2}, std::vector<double>(6, 0.0))), std::invalid_argument);
}

TEST_CASE("backward of sum gives ones") {
  Graph g;
  Tensor w = g.variable({2, 3}, {1, 2, 3, 4, 5, 6});
  auto grads = g.backward(sum(w));
  for (double v : grads.of(w)) CHECK(v == 1.0);
}

TEST_CASE("backward of a squared scalar gives 2a") {
  for (double a : {-3.0, 0.5, 2.0}) {
    Graph g;
    Tensor w = g.variable({1}, {a});
    auto grads = g.backward(sum(multiply(w, w)));
    CHECK(grads.of(w)[0] == doctest::Approx(2 * a));
  }
}

TEST_CASE("backward rejects non-scalar losses") {
  Graph g;
  Tensor w = g.variable({3}, {1, 2, 3});
  CHECK_THROWS_AS(g.backward(w), std::invalid_argument);
}

TEST_CASE("parameters absent from the graph get zero gradients") {
  ParameterStore store;
  store.add("used", {2}, {1.0, 2.0});
  store.add("unused", {3}, {1.0, 1.0, 1.0});
  Graph g;
  auto grads = g.backward(sum(g.param(store.at(0)))).collect(store);
  CHECK(grads[0] == std::vector<double>{1.0, 1.0});
  CHECK(grads[1] == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("every op matches central finite differences") {
  for (const auto& c : testing::op_cases()) {
    const auto result = testing::check_op(c);
    INFO(c.name, ": ", result.worst_entry);
    CHECK(result.max_relative_error < 1e-4);
  }
}

TEST_CASE("backward is bit-identical across repeated runs") {
  ParameterStore store;
  Rng rng(9);
  add_parameter(store, "w", {6, 5}, InitScheme::glorot(), rng);
  add_parameter(store, "x", {5}, InitScheme::uniform(-1, 1), rng);
  auto run = [&] {
    Graph g;
    Tensor h = ad::tanh(matmul(g.param(store.at(0)), g.param(store.at(1))));
    return g.backward(cross_entropy(h, 2)).collect(store);
  };
  CHECK(run() == run());
}

TEST_CASE("adam with zero gradients leaves parameters unchanged") {
  ParameterStore store;
  store.add("w", {3}, {1.0, -2.0, 0.5});
  AdamState state;
  for (int i = 0; i < 5; ++i) adam_update(store, {{0.0, 0.0, 0.0}}, state);
  CHECK(store.at(0).value == std::vector<double>{1.0, -2.0, 0.5});
  CHECK(state.step == 5);
}

TEST_CASE("global norm clipping halves a norm-10 gradient at clip 5") {
  std::vector<std::vector<double>> grads{{6.0, 8.0}};
  const double norm = clip_by_global_norm(grads, 5.0);
  CHECK(norm == doctest::Approx(10.0));
  CHECK(grads[0][0] == doctest::Approx(3.0));
  CHECK(grads[0][1] == doctest::Approx(4.0));

  // The first Adam moment sees the clipped gradient.
  ParameterStore store;
  store.add("w", {2}, {0.0, 0.0});
  AdamState state;
  adam_update(store, {{6.0, 8.0}}, state, {.learning_rate = 1e-3, .clip_norm = 5.0});
  CHECK(state.first_moment[0][0] == doctest::Approx(0.1 * 3.0));
  CHECK(state.first_moment[0][1] == doctest::Approx(0.1 * 4.0));
}

TEST_CASE("adam minimizes a scalar quadratic") {
  ParameterStore store;
  store.add("w", {1}, {0.0});
  AdamState state;
  for (int i = 0; i < 200; ++i) {
    Graph g;
    Tensor w = g.param(store.at(0));
    Tensor d = add_scalar(w, -3.0);
    auto grads = g.backward(sum(multiply(d, d))).collect(store);
    adam_update(store, grads, state, {.learning_rate = 0.1, .clip_norm = 5.0});
  }
  CHECK(std::abs(store.at(0).value[0] - 3.0) < 0.1);
}

TEST_CASE("adam reports divergence on NaN gradients and does not update") {
  ParameterStore store;
  store.add("w", {2}, {1.0, 2.0});
  AdamState state;
  auto result = adam_update(store, {{std::nan(""), 0.0}}, state);
  CHECK(result.status == UpdateStatus::diverged);
  CHECK(store.at(0).value == std::vector<double>{1.0, 2.0});
  CHECK(state.step == 0);
}

TEST_CASE("glorot and uniform initializers respect their bounds") {
  Rng rng(5);
  const auto glorot = init_values({100, 200}, InitScheme::glorot(), rng);
  const double bound = std::sqrt(6.0 / 300.0);
  CHECK(bound == doctest::Approx(0.1414).epsilon(1e-3));
  for (double v : glorot) CHECK(std::abs(v) <= bound);
  const auto emb = init_values({50, 16}, InitScheme::embedding(), rng);
  for (double v : emb) CHECK(std::abs(v) <= 4e-3);
}

TEST_CASE("initializers are deterministic per seed and reject empty extents") {
  Rng a(11), b(11);
  CHECK(init_values({4, 4}, InitScheme::glorot(), a) == init_values({4, 4}, InitScheme::glorot(), b));
  Rng rng(0);
  CHECK_THROWS_AS(init_values({0, 3}, InitScheme::glorot(), rng), std::invalid_argument);
}

TEST_CASE("checkpoint round trip preserves every bit") {
  Checkpoint ckpt;
  ckpt.kind = "cvae";
  ckpt.metadata = {{"hidden", "8"}, {"note", "a=b"}};
  Rng rng(2);
  add_parameter(ckpt.params, "enc.w", {3, 2}, InitScheme::glorot(), rng);
  ckpt.params.add("odd", {2}, {-0.0, 1e-300});
  const std::string bytes = serialize_checkpoint(ckpt);
  CHECK(bytes.rfind("MOJITALK-CHECKPOINT 1\nkind=cvae\n", 0) == 0);
  const Checkpoint back = deserialize_checkpoint(bytes);
  CHECK(back.kind == "cvae");
  CHECK(back.metadata == ckpt.metadata);
  REQUIRE(back.params.size() == 2);
  CHECK(back.params.at(0).shape == Shape{3, 2});
  CHECK(serialize_checkpoint(back) == bytes);
  CHECK(std::signbit(back.params.at(1).value[0]));
}

TEST_CASE("truncated checkpoints are rejected") {
  Checkpoint ckpt;
  ckpt.kind = "base";
  ckpt.params.add("w", {2}, {1.0, 2.0});
  std::string bytes = serialize_checkpoint(ckpt);
  bytes.pop_back();
  CHECK_THROWS(deserialize_checkpoint(bytes));
}
