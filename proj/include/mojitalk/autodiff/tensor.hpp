#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mojitalk::ad {

using Shape = std::vector<std::size_t>;
using NodeId = std::size_t;

std::size_t shape_size(const Shape& shape);
std::string shape_to_string(const Shape& shape);

// A named, trainable array. Owned by a ParameterStore; graphs only read it.
struct Parameter {
  std::string name;
  Shape shape;
  std::vector<double> value;
};

// Ordered collection of parameters addressed by index or name. Index order is
// insertion order and is what checkpoints and optimizers iterate over.
class ParameterStore {
 public:
  std::size_t add(std::string name, Shape shape, std::vector<double> value);

  const Parameter& at(std::size_t index) const { return params_.at(index); }
  Parameter& at(std::size_t index) { return params_.at(index); }
  const Parameter* find(const std::string& name) const;
  Parameter* find(const std::string& name);
  std::size_t index_of(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t total_values() const;
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

enum class OpKind {
  leaf,
  matmul,
  add,
  sub,
  multiply,
  tanh,
  sigmoid,
  exp,
  scale,
  add_scalar,
  softmax,
  concat,
  slice,
  stack,
  embedding_lookup,
  cross_entropy,
  sum,
  mean,
};

const char* op_name(OpKind kind);

// Non-tensor arguments of an op: scalar for scale/add_scalar, offset/length
// for slice, ids for embedding_lookup (row ids) and cross_entropy (targets).
struct OpAttrs {
  double scalar = 0.0;
  std::size_t offset = 0;
  std::size_t length = 0;
  std::vector<int> ids;
};

class Graph;

// Lightweight handle to a node of a Graph. Valid while the graph lives.
class Tensor {
 public:
  Tensor() = default;

  NodeId id() const { return id_; }
  Graph* graph() const { return graph_; }
  bool valid() const { return graph_ != nullptr; }
  const Shape& shape() const;
  std::size_t size() const;
  std::span<const double> values() const;
  double item() const;
  double operator[](std::size_t i) const { return values()[i]; }

 private:
  friend class Graph;
  Tensor(Graph* graph, NodeId id) : graph_(graph), id_(id) {}

  Graph* graph_ = nullptr;
  NodeId id_ = 0;
};

class Gradients;

// Define-by-run computation graph. Nodes are appended in evaluation order, so
// reverse creation order is a valid topological order for backward.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Tensor constant(Shape shape, std::vector<double> values);
  Tensor scalar(double value) { return constant({1}, {value}); }
  // Leaf that receives a gradient; used for free inputs in tests and checks.
  Tensor variable(Shape shape, std::vector<double> values);
  // Binds a parameter as a leaf. Binding the same parameter twice returns
  // the same node.
  Tensor param(const Parameter& p);

  Tensor apply(OpKind kind, std::span<const Tensor> inputs, const OpAttrs& attrs = {});

  // Reverse pass from a scalar loss.
  Gradients backward(const Tensor& loss) const;

  const Shape& shape(NodeId id) const { return nodes_.at(id).shape; }
  std::span<const double> values(NodeId id) const;
  std::size_t node_count() const { return nodes_.size(); }

 private:
  friend class Gradients;

  struct Node {
    OpKind kind = OpKind::leaf;
    Shape shape;
    std::vector<double> value;
    const Parameter* param = nullptr;
    std::vector<NodeId> inputs;
    OpAttrs attrs;
    bool requires_grad = false;
  };

  const double* data(NodeId id) const;
  Tensor push(Node node);
  void backprop_node(NodeId id, std::vector<std::vector<double>>& grads) const;

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, NodeId> bound_params_;
};

// Result of Graph::backward: one gradient array per reached node.
class Gradients {
 public:
  // Gradient of the loss with respect to t; zeros when t was not reached.
  std::vector<double> of(const Tensor& t) const;
  // Per-parameter gradients aligned with store indices. Parameters that did
  // not participate get zero arrays.
  std::vector<std::vector<double>> collect(const ParameterStore& store) const;

 private:
  friend class Graph;
  const Graph* graph_ = nullptr;
  std::vector<std::vector<double>> grads_;
};

// Convenience wrappers around Graph::apply.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor multiply(const Tensor& a, const Tensor& b);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double shift);
Tensor softmax(const Tensor& a);
Tensor concat(std::span<const Tensor> parts);
Tensor concat(std::initializer_list<Tensor> parts);
Tensor slice(const Tensor& a, std::size_t offset, std::size_t length);
Tensor stack(std::span<const Tensor> rows);
Tensor embedding_lookup(const Tensor& table, std::span<const int> ids);
Tensor embedding_lookup(const Tensor& table, int id);
// Sum over rows of -log softmax(logits)[target]; logits are [C] or [N, C].
Tensor cross_entropy(const Tensor& logits, std::span<const int> targets);
Tensor cross_entropy(const Tensor& logits, int target);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

}  // namespace mojitalk::ad
