#include "mojitalk/autodiff/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mojitalk::ad {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t extent : shape) n *= extent;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ',';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

std::size_t ParameterStore::add(std::string name, Shape shape, std::vector<double> value) {
  if (by_name_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  if (shape.empty() || std::any_of(shape.begin(), shape.end(), [](std::size_t e) { return e == 0; }))
    throw std::invalid_argument("parameter " + name + ": non-positive extent in " + shape_to_string(shape));
  if (value.size() != shape_size(shape))
    throw std::invalid_argument("parameter " + name + ": value count does not match " + shape_to_string(shape));
  const std::size_t index = params_.size();
  by_name_.emplace(name, index);
  params_.push_back(Parameter{std::move(name), std::move(shape), std::move(value)});
  return index;
}

const Parameter* ParameterStore::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : &params_[it->second];
}

Parameter* ParameterStore::find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : &params_[it->second];
}

std::size_t ParameterStore::index_of(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::out_of_range("unknown parameter: " + name);
  return it->second;
}

std::size_t ParameterStore::total_values() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::leaf: return "leaf";
    case OpKind::matmul: return "matmul";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::multiply: return "multiply";
    case OpKind::tanh: return "tanh";
    case OpKind::sigmoid: return "sigmoid";
    case OpKind::exp: return "exp";
    case OpKind::scale: return "scale";
    case OpKind::add_scalar: return "add_scalar";
    case OpKind::softmax: return "softmax";
    case OpKind::concat: return "concat";
    case OpKind::slice: return "slice";
    case OpKind::stack: return "stack";
    case OpKind::embedding_lookup: return "embedding_lookup";
    case OpKind::cross_entropy: return "cross_entropy";
    case OpKind::sum: return "sum";
    case OpKind::mean: return "mean";
  }
  return "unknown";
}

const Shape& Tensor::shape() const { return graph_->shape(id_); }
std::size_t Tensor::size() const { return shape_size(shape()); }
std::span<const double> Tensor::values() const { return graph_->values(id_); }

double Tensor::item() const {
  if (size() != 1) throw std::invalid_argument("item() on tensor of shape " + shape_to_string(shape()));
  return values()[0];
}

namespace {

[[noreturn]] void shape_error(OpKind kind, const Shape& a, const Shape& b) {
  throw std::invalid_argument(std::string(op_name(kind)) + ": shape mismatch " + shape_to_string(a) + " vs " +
                              shape_to_string(b));
}

[[noreturn]] void shape_error(OpKind kind, const Shape& a, const std::string& what) {
  throw std::invalid_argument(std::string(op_name(kind)) + ": " + what + " for shape " + shape_to_string(a));
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Row-wise softmax over the last axis of a row-major [rows, cols] block.
void softmax_rows(const double* in, double* out, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = in + r * cols;
    double* y = out + r * cols;
    const double m = *std::max_element(x, x + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      y[c] = std::exp(x[c] - m);
      total += y[c];
    }
    for (std::size_t c = 0; c < cols; ++c) y[c] /= total;
  }
}

double log_sum_exp(const double* x, std::size_t n) {
  const double m = *std::max_element(x, x + n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += std::exp(x[i] - m);
  return m + std::log(total);
}

std::size_t last_dim(const Shape& s) { return s.back(); }
std::size_t outer_dims(const Shape& s) { return shape_size(s) / s.back(); }

}  // namespace

std::span<const double> Graph::values(NodeId id) const {
  const Node& n = nodes_.at(id);
  if (n.param) return {n.param->value.data(), n.param->value.size()};
  return {n.value.data(), n.value.size()};
}

const double* Graph::data(NodeId id) const {
  const Node& n = nodes_[id];
  return n.param ? n.param->value.data() : n.value.data();
}

Tensor Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return Tensor(this, nodes_.size() - 1);
}

Tensor Graph::constant(Shape shape, std::vector<double> values) {
  if (values.size() != shape_size(shape)) shape_error(OpKind::leaf, shape, "value count mismatch");
  Node n;
  n.shape = std::move(shape);
  n.value = std::move(values);
  return push(std::move(n));
}

Tensor Graph::variable(Shape shape, std::vector<double> values) {
  Tensor t = constant(std::move(shape), std::move(values));
  nodes_[t.id()].requires_grad = true;
  return t;
}

Tensor Graph::param(const Parameter& p) {
  auto it = bound_params_.find(&p);
  if (it != bound_params_.end()) return Tensor(this, it->second);
  Node n;
  n.shape = p.shape;
  n.param = &p;
  n.requires_grad = true;
  Tensor t = push(std::move(n));
  bound_params_.emplace(&p, t.id());
  return t;
}

Tensor Graph::apply(OpKind kind, std::span<const Tensor> inputs, const OpAttrs& attrs) {
  for (const Tensor& t : inputs)
    if (t.graph() != this) throw std::invalid_argument(std::string(op_name(kind)) + ": input from another graph");

  auto arity = [&](std::size_t n) {
    if (inputs.size() != n)
      throw std::invalid_argument(std::string(op_name(kind)) + ": expected " + std::to_string(n) + " inputs, got " +
                                  std::to_string(inputs.size()));
  };

  Node out;
  out.kind = kind;
  out.attrs = attrs;
  for (const Tensor& t : inputs) {
    out.inputs.push_back(t.id());
    out.requires_grad = out.requires_grad || nodes_[t.id()].requires_grad;
  }

  switch (kind) {
    case OpKind::leaf:
      throw std::invalid_argument("leaf: use constant/variable/param");

    case OpKind::matmul: {
      arity(2);
      const Shape& a = inputs[0].shape();
      const Shape& b = inputs[1].shape();
      const double* x = data(inputs[0].id());
      const double* y = data(inputs[1].id());
      if (a.size() == 2 && b.size() == 2) {
        if (a[1] != b[0]) shape_error(kind, a, b);
        const std::size_t m = a[0], k = a[1], n = b[1];
        out.shape = {m, n};
        out.value.assign(m * n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            const double s = x[i * k + p];
            if (s == 0.0) continue;
            const double* row = y + p * n;
            double* o = out.value.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) o[j] += s * row[j];
          }
      } else if (a.size() == 2 && b.size() == 1) {
        if (a[1] != b[0]) shape_error(kind, a, b);
        const std::size_t m = a[0], k = a[1];
        out.shape = {m};
        out.value.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
          const double* row = x + i * k;
          double acc = 0.0;
          for (std::size_t p = 0; p < k; ++p) acc += row[p] * y[p];
          out.value[i] = acc;
        }
      } else if (a.size() == 1 && b.size() == 2) {
        if (a[0] != b[0]) shape_error(kind, a, b);
        const std::size_t k = b[0], n = b[1];
        out.shape = {n};
        out.value.assign(n, 0.0);
        for (std::size_t p = 0; p < k; ++p) {
          const double s = x[p];
          const double* row = y + p * n;
          for (std::size_t j = 0; j < n; ++j) out.value[j] += s * row[j];
        }
      } else {
        shape_error(kind, a, b);
      }
      break;
    }

    case OpKind::add:
    case OpKind::sub:
    case OpKind::multiply: {
      arity(2);
      const Shape& a = inputs[0].shape();
      const Shape& b = inputs[1].shape();
      if (a != b) shape_error(kind, a, b);
      const double* x = data(inputs[0].id());
      const double* y = data(inputs[1].id());
      out.shape = a;
      const std::size_t n = shape_size(a);
      out.value.resize(n);
      if (kind == OpKind::add)
        for (std::size_t i = 0; i < n; ++i) out.value[i] = x[i] + y[i];
      else if (kind == OpKind::sub)
        for (std::size_t i = 0; i < n; ++i) out.value[i] = x[i] - y[i];
      else
        for (std::size_t i = 0; i < n; ++i) out.value[i] = x[i] * y[i];
      break;
    }

    case OpKind::tanh:
    case OpKind::sigmoid:
    case OpKind::exp:
    case OpKind::scale:
    case OpKind::add_scalar: {
      arity(1);
      out.shape = inputs[0].shape();
      const double* x = data(inputs[0].id());
      const std::size_t n = shape_size(out.shape);
      out.value.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        switch (kind) {
          case OpKind::tanh: out.value[i] = std::tanh(x[i]); break;
          case OpKind::sigmoid: out.value[i] = stable_sigmoid(x[i]); break;
          case OpKind::exp: out.value[i] = std::exp(x[i]); break;
          case OpKind::scale: out.value[i] = x[i] * attrs.scalar; break;
          default: out.value[i] = x[i] + attrs.scalar; break;
        }
      }
      break;
    }

    case OpKind::softmax: {
      arity(1);
      out.shape = inputs[0].shape();
      if (out.shape.size() > 2) shape_error(kind, out.shape, "rank above 2");
      out.value.resize(shape_size(out.shape));
      softmax_rows(data(inputs[0].id()), out.value.data(), outer_dims(out.shape), last_dim(out.shape));
      break;
    }

    case OpKind::concat: {
      if (inputs.empty()) throw std::invalid_argument("concat: no inputs");
      const Shape& first = inputs[0].shape();
      std::size_t width = 0;
      for (const Tensor& t : inputs) {
        const Shape& s = t.shape();
        if (s.size() != first.size() || !std::equal(s.begin(), s.end() - 1, first.begin()))
          shape_error(kind, first, s);
        width += s.back();
      }
      out.shape = first;
      out.shape.back() = width;
      const std::size_t rows = outer_dims(first);
      out.value.resize(rows * width);
      std::size_t offset = 0;
      for (const Tensor& t : inputs) {
        const std::size_t w = t.shape().back();
        const double* x = data(t.id());
        for (std::size_t r = 0; r < rows; ++r) std::copy(x + r * w, x + (r + 1) * w, out.value.data() + r * width + offset);
        offset += w;
      }
      break;
    }

    case OpKind::slice: {
      arity(1);
      const Shape& a = inputs[0].shape();
      if (attrs.length == 0 || attrs.offset + attrs.length > a.back())
        shape_error(kind, a, "slice [" + std::to_string(attrs.offset) + ", +" + std::to_string(attrs.length) + ") out of range");
      out.shape = a;
      out.shape.back() = attrs.length;
      const std::size_t rows = outer_dims(a), w = a.back();
      const double* x = data(inputs[0].id());
      out.value.resize(rows * attrs.length);
      for (std::size_t r = 0; r < rows; ++r)
        std::copy(x + r * w + attrs.offset, x + r * w + attrs.offset + attrs.length, out.value.data() + r * attrs.length);
      break;
    }

    case OpKind::stack: {
      if (inputs.empty()) throw std::invalid_argument("stack: no inputs");
      const Shape& first = inputs[0].shape();
      if (first.size() != 1) shape_error(kind, first, "rows must be vectors");
      for (const Tensor& t : inputs)
        if (t.shape() != first) shape_error(kind, first, t.shape());
      const std::size_t d = first[0];
      out.shape = {inputs.size(), d};
      out.value.resize(inputs.size() * d);
      for (std::size_t r = 0; r < inputs.size(); ++r) {
        const double* x = data(inputs[r].id());
        std::copy(x, x + d, out.value.data() + r * d);
      }
      break;
    }

    case OpKind::embedding_lookup: {
      arity(1);
      const Shape& table = inputs[0].shape();
      if (table.size() != 2) shape_error(kind, table, "table must be rank 2");
      if (attrs.ids.empty()) shape_error(kind, table, "no ids");
      const std::size_t rows = table[0], d = table[1];
      const double* x = data(inputs[0].id());
      // length 0 requests a single squeezed row.
      if (attrs.length == 0 && attrs.ids.size() != 1) shape_error(kind, table, "squeezed lookup needs one id");
      out.shape = attrs.length == 0 ? Shape{d} : Shape{attrs.ids.size(), d};
      out.value.resize(attrs.ids.size() * d);
      for (std::size_t i = 0; i < attrs.ids.size(); ++i) {
        const int id = attrs.ids[i];
        if (id < 0 || static_cast<std::size_t>(id) >= rows)
          shape_error(kind, table, "row id " + std::to_string(id) + " out of range");
        std::copy(x + id * d, x + (id + 1) * d, out.value.data() + i * d);
      }
      break;
    }

    case OpKind::cross_entropy: {
      arity(1);
      const Shape& a = inputs[0].shape();
      if (a.size() > 2) shape_error(kind, a, "rank above 2");
      const std::size_t rows = outer_dims(a), classes = a.back();
      if (attrs.ids.size() != rows)
        shape_error(kind, a, Shape{attrs.ids.size()});
      const double* x = data(inputs[0].id());
      double total = 0.0;
      for (std::size_t r = 0; r < rows; ++r) {
        const int t = attrs.ids[r];
        if (t < 0 || static_cast<std::size_t>(t) >= classes)
          shape_error(kind, a, "target " + std::to_string(t) + " out of range");
        total += log_sum_exp(x + r * classes, classes) - x[r * classes + t];
      }
      out.shape = {1};
      out.value = {total};
      break;
    }

    case OpKind::sum:
    case OpKind::mean: {
      arity(1);
      const std::size_t n = inputs[0].size();
      const double* x = data(inputs[0].id());
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += x[i];
      out.shape = {1};
      out.value = {kind == OpKind::sum ? total : total / static_cast<double>(n)};
      break;
    }
  }
  return push(std::move(out));
}

void Graph::backprop_node(NodeId id, std::vector<std::vector<double>>& grads) const {
  const Node& node = nodes_[id];
  const std::vector<double>& g = grads[id];

  auto grad_of = [&](std::size_t which) -> double* {
    const NodeId in = node.inputs[which];
    if (!nodes_[in].requires_grad) return nullptr;
    auto& dst = grads[in];
    if (dst.empty()) dst.assign(shape_size(nodes_[in].shape), 0.0);
    return dst.data();
  };

  switch (node.kind) {
    case OpKind::leaf:
      return;

    case OpKind::matmul: {
      const Shape& a = nodes_[node.inputs[0]].shape;
      const Shape& b = nodes_[node.inputs[1]].shape;
      const double* x = data(node.inputs[0]);
      const double* y = data(node.inputs[1]);
      double* gx = grad_of(0);
      double* gy = grad_of(1);
      if (a.size() == 2 && b.size() == 2) {
        const std::size_t m = a[0], k = a[1], n = b[1];
        for (std::size_t i = 0; i < m; ++i) {
          const double* go = g.data() + i * n;
          for (std::size_t p = 0; p < k; ++p) {
            const double* row = y + p * n;
            if (gx) {
              double acc = 0.0;
              for (std::size_t j = 0; j < n; ++j) acc += go[j] * row[j];
              gx[i * k + p] += acc;
            }
            if (gy) {
              const double s = x[i * k + p];
              double* gr = gy + p * n;
              for (std::size_t j = 0; j < n; ++j) gr[j] += s * go[j];
            }
          }
        }
      } else if (a.size() == 2) {
        const std::size_t m = a[0], k = a[1];
        for (std::size_t i = 0; i < m; ++i) {
          const double gi = g[i];
          if (gi == 0.0) continue;
          if (gx) {
            double* gr = gx + i * k;
            for (std::size_t p = 0; p < k; ++p) gr[p] += gi * y[p];
          }
          if (gy) {
            const double* row = x + i * k;
            for (std::size_t p = 0; p < k; ++p) gy[p] += gi * row[p];
          }
        }
      } else {
        const std::size_t k = b[0], n = b[1];
        for (std::size_t p = 0; p < k; ++p) {
          const double* row = y + p * n;
          if (gx) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += g[j] * row[j];
            gx[p] += acc;
          }
          if (gy) {
            double* gr = gy + p * n;
            for (std::size_t j = 0; j < n; ++j) gr[j] += x[p] * g[j];
          }
        }
      }
      return;
    }

    case OpKind::add:
    case OpKind::sub:
    case OpKind::multiply: {
      const double* x = data(node.inputs[0]);
      const double* y = data(node.inputs[1]);
      double* gx = grad_of(0);
      double* gy = grad_of(1);
      const std::size_t n = g.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (node.kind == OpKind::add) {
          if (gx) gx[i] += g[i];
          if (gy) gy[i] += g[i];
        } else if (node.kind == OpKind::sub) {
          if (gx) gx[i] += g[i];
          if (gy) gy[i] -= g[i];
        } else {
          if (gx) gx[i] += g[i] * y[i];
          if (gy) gy[i] += g[i] * x[i];
        }
      }
      return;
    }

    case OpKind::tanh:
    case OpKind::sigmoid:
    case OpKind::exp:
    case OpKind::scale:
    case OpKind::add_scalar: {
      double* gx = grad_of(0);
      if (!gx) return;
      const std::vector<double>& y = node.value;
      for (std::size_t i = 0; i < g.size(); ++i) {
        switch (node.kind) {
          case OpKind::tanh: gx[i] += g[i] * (1.0 - y[i] * y[i]); break;
          case OpKind::sigmoid: gx[i] += g[i] * y[i] * (1.0 - y[i]); break;
          case OpKind::exp: gx[i] += g[i] * y[i]; break;
          case OpKind::scale: gx[i] += g[i] * node.attrs.scalar; break;
          default: gx[i] += g[i]; break;
        }
      }
      return;
    }

    case OpKind::softmax: {
      double* gx = grad_of(0);
      if (!gx) return;
      const std::size_t cols = last_dim(node.shape), rows = outer_dims(node.shape);
      for (std::size_t r = 0; r < rows; ++r) {
        const double* y = node.value.data() + r * cols;
        const double* go = g.data() + r * cols;
        double dot = 0.0;
        for (std::size_t c = 0; c < cols; ++c) dot += go[c] * y[c];
        for (std::size_t c = 0; c < cols; ++c) gx[r * cols + c] += y[c] * (go[c] - dot);
      }
      return;
    }

    case OpKind::concat: {
      const std::size_t width = node.shape.back(), rows = outer_dims(node.shape);
      std::size_t offset = 0;
      for (std::size_t which = 0; which < node.inputs.size(); ++which) {
        const std::size_t w = nodes_[node.inputs[which]].shape.back();
        if (double* gx = grad_of(which))
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < w; ++c) gx[r * w + c] += g[r * width + offset + c];
        offset += w;
      }
      return;
    }

    case OpKind::slice: {
      double* gx = grad_of(0);
      if (!gx) return;
      const Shape& a = nodes_[node.inputs[0]].shape;
      const std::size_t rows = outer_dims(a), w = a.back(), len = node.attrs.length;
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < len; ++c) gx[r * w + node.attrs.offset + c] += g[r * len + c];
      return;
    }

    case OpKind::stack: {
      const std::size_t d = node.shape[1];
      for (std::size_t r = 0; r < node.inputs.size(); ++r)
        if (double* gx = grad_of(r))
          for (std::size_t c = 0; c < d; ++c) gx[c] += g[r * d + c];
      return;
    }

    case OpKind::embedding_lookup: {
      double* gx = grad_of(0);
      if (!gx) return;
      const std::size_t d = nodes_[node.inputs[0]].shape[1];
      for (std::size_t i = 0; i < node.attrs.ids.size(); ++i) {
        double* row = gx + static_cast<std::size_t>(node.attrs.ids[i]) * d;
        for (std::size_t c = 0; c < d; ++c) row[c] += g[i * d + c];
      }
      return;
    }

    case OpKind::cross_entropy: {
      double* gx = grad_of(0);
      if (!gx) return;
      const Shape& a = nodes_[node.inputs[0]].shape;
      const std::size_t rows = outer_dims(a), classes = a.back();
      const double* x = data(node.inputs[0]);
      std::vector<double> p(classes);
      for (std::size_t r = 0; r < rows; ++r) {
        softmax_rows(x + r * classes, p.data(), 1, classes);
        p[static_cast<std::size_t>(node.attrs.ids[r])] -= 1.0;
        for (std::size_t c = 0; c < classes; ++c) gx[r * classes + c] += g[0] * p[c];
      }
      return;
    }

    case OpKind::sum:
    case OpKind::mean: {
      double* gx = grad_of(0);
      if (!gx) return;
      const std::size_t n = shape_size(nodes_[node.inputs[0]].shape);
      const double v = node.kind == OpKind::sum ? g[0] : g[0] / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) gx[i] += v;
      return;
    }
  }
}

Gradients Graph::backward(const Tensor& loss) const {
  if (loss.graph() != this) throw std::invalid_argument("backward: loss belongs to another graph");
  if (loss.size() != 1)
    throw std::invalid_argument("backward: loss must be scalar, got shape " + shape_to_string(loss.shape()));
  Gradients result;
  result.graph_ = this;
  result.grads_.resize(nodes_.size());
  if (!nodes_[loss.id()].requires_grad) return result;
  result.grads_[loss.id()] = {1.0};
  for (NodeId id = loss.id() + 1; id-- > 0;) {
    if (result.grads_[id].empty() || !nodes_[id].requires_grad) continue;
    backprop_node(id, result.grads_);
  }
  return result;
}

std::vector<double> Gradients::of(const Tensor& t) const {
  if (t.id() < grads_.size() && !grads_[t.id()].empty()) return grads_[t.id()];
  return std::vector<double>(t.size(), 0.0);
}

std::vector<std::vector<double>> Gradients::collect(const ParameterStore& store) const {
  std::vector<std::vector<double>> out;
  out.reserve(store.size());
  for (const Parameter& p : store) {
    const std::vector<double>* found = nullptr;
    if (graph_) {
      auto it = graph_->bound_params_.find(&p);
      if (it != graph_->bound_params_.end() && it->second < grads_.size() && !grads_[it->second].empty())
        found = &grads_[it->second];
    }
    if (found)
      out.push_back(*found);
    else
      out.emplace_back(p.value.size(), 0.0);
  }
  return out;
}

namespace {
Graph& graph_of(const Tensor& t) {
  if (!t.valid()) throw std::invalid_argument("operation on an empty tensor handle");
  return *t.graph();
}
}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  const Tensor in[] = {a, b};
  return graph_of(a).apply(OpKind::matmul, in);
}
Tensor add(const Tensor& a, const Tensor& b) {
  const Tensor in[] = {a, b};
  return graph_of(a).apply(OpKind::add, in);
}
Tensor sub(const Tensor& a, const Tensor& b) {
  const Tensor in[] = {a, b};
  return graph_of(a).apply(OpKind::sub, in);
}
Tensor multiply(const Tensor& a, const Tensor& b) {
  const Tensor in[] = {a, b};
  return graph_of(a).apply(OpKind::multiply, in);
}
Tensor tanh(const Tensor& a) { return graph_of(a).apply(OpKind::tanh, std::span(&a, 1)); }
Tensor sigmoid(const Tensor& a) { return graph_of(a).apply(OpKind::sigmoid, std::span(&a, 1)); }
Tensor exp(const Tensor& a) { return graph_of(a).apply(OpKind::exp, std::span(&a, 1)); }
Tensor scale(const Tensor& a, double factor) {
  OpAttrs attrs;
  attrs.scalar = factor;
  return graph_of(a).apply(OpKind::scale, std::span(&a, 1), attrs);
}
Tensor add_scalar(const Tensor& a, double shift) {
  OpAttrs attrs;
  attrs.scalar = shift;
  return graph_of(a).apply(OpKind::add_scalar, std::span(&a, 1), attrs);
}
Tensor softmax(const Tensor& a) { return graph_of(a).apply(OpKind::softmax, std::span(&a, 1)); }
Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  return graph_of(parts[0]).apply(OpKind::concat, parts);
}
Tensor concat(std::initializer_list<Tensor> parts) { return concat(std::span(parts.begin(), parts.size())); }
Tensor slice(const Tensor& a, std::size_t offset, std::size_t length) {
  OpAttrs attrs;
  attrs.offset = offset;
  attrs.length = length;
  return graph_of(a).apply(OpKind::slice, std::span(&a, 1), attrs);
}
Tensor stack(std::span<const Tensor> rows) {
  if (rows.empty()) throw std::invalid_argument("stack: no inputs");
  return graph_of(rows[0]).apply(OpKind::stack, rows);
}
Tensor embedding_lookup(const Tensor& table, std::span<const int> ids) {
  OpAttrs attrs;
  attrs.ids.assign(ids.begin(), ids.end());
  attrs.length = ids.size();
  return graph_of(table).apply(OpKind::embedding_lookup, std::span(&table, 1), attrs);
}
Tensor embedding_lookup(const Tensor& table, int id) {
  OpAttrs attrs;
  attrs.ids = {id};
  return graph_of(table).apply(OpKind::embedding_lookup, std::span(&table, 1), attrs);
}
Tensor cross_entropy(const Tensor& logits, std::span<const int> targets) {
  OpAttrs attrs;
  attrs.ids.assign(targets.begin(), targets.end());
  return graph_of(logits).apply(OpKind::cross_entropy, std::span(&logits, 1), attrs);
}
Tensor cross_entropy(const Tensor& logits, int target) { return cross_entropy(logits, std::span(&target, 1)); }
Tensor sum(const Tensor& a) { return graph_of(a).apply(OpKind::sum, std::span(&a, 1)); }
Tensor mean(const Tensor& a) { return graph_of(a).apply(OpKind::mean, std::span(&a, 1)); }

}  // namespace mojitalk::ad
