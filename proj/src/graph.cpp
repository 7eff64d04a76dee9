#include "sumstate/graph.hpp"

#include <algorithm>
#include <cmath>

#include "sumstate/error.hpp"

namespace sumstate {

Expr Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return Expr{static_cast<int>(nodes_.size()) - 1};
}

const Graph::Node& Graph::node(Expr e) const {
  if (!e.valid() || e.id >= static_cast<int>(nodes_.size())) {
    throw_internal("graph: invalid expression handle");
  }
  return nodes_[e.id];
}

Expr Graph::constant(std::vector<double> value) {
  Node n;
  n.op = Op::Constant;
  n.val = std::move(value);
  return push(std::move(n));
}

Expr Graph::zeros(std::size_t size) { return constant(std::vector<double>(size, 0.0)); }

Expr Graph::table_row(Tensor& table, std::size_t row) {
  if (row >= table.rows) throw_internal("graph: table row out of range in " + table.name);
  Node n;
  n.op = Op::TableRow;
  n.tensor = &table;
  n.aux = row;
  n.val.assign(table.value.begin() + row * table.cols,
               table.value.begin() + (row + 1) * table.cols);
  return push(std::move(n));
}

Expr Graph::concat(const std::vector<Expr>& inputs) {
  Node n;
  n.op = Op::Concat;
  for (Expr e : inputs) {
    n.inputs.push_back(e.id);
    const auto& v = node(e).val;
    n.val.insert(n.val.end(), v.begin(), v.end());
  }
  return push(std::move(n));
}

Expr Graph::affine(Tensor& weight, Tensor& bias, const std::vector<Expr>& inputs) {
  std::size_t in_dim = 0;
  for (Expr e : inputs) in_dim += node(e).val.size();
  if (weight.cols != in_dim || bias.rows != weight.rows || bias.cols != 1) {
    throw_internal("graph: affine shape mismatch for " + weight.name + " (" +
                   std::to_string(weight.rows) + "x" + std::to_string(weight.cols) +
                   " vs input " + std::to_string(in_dim) + ")");
  }
  Node n;
  n.op = Op::Affine;
  n.tensor = &weight;
  n.bias = &bias;
  for (Expr e : inputs) n.inputs.push_back(e.id);
  n.val = bias.value;
  std::size_t offset = 0;
  for (Expr e : inputs) {
    const auto& x = node(e).val;
    for (std::size_t r = 0; r < weight.rows; ++r) {
      const double* w = &weight.value[r * weight.cols + offset];
      double acc = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * x[k];
      n.val[r] += acc;
    }
    offset += x.size();
  }
  return push(std::move(n));
}

Expr Graph::tanh_of(Expr x) {
  Node n;
  n.op = Op::Tanh;
  n.a = x.id;
  n.val = node(x).val;
  for (double& v : n.val) v = std::tanh(v);
  return push(std::move(n));
}

Expr Graph::sigmoid_of(Expr x) {
  Node n;
  n.op = Op::Sigmoid;
  n.a = x.id;
  n.val = node(x).val;
  for (double& v : n.val) {
    if (v >= 0) {
      v = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      v = e / (1.0 + e);
    }
  }
  return push(std::move(n));
}

Expr Graph::add(Expr a, Expr b) {
  const auto& va = node(a).val;
  const auto& vb = node(b).val;
  if (va.size() != vb.size()) throw_internal("graph: add size mismatch");
  Node n;
  n.op = Op::Add;
  n.a = a.id;
  n.b = b.id;
  n.val = va;
  for (std::size_t i = 0; i < vb.size(); ++i) n.val[i] += vb[i];
  return push(std::move(n));
}

Expr Graph::cmul(Expr a, Expr b) {
  const auto& va = node(a).val;
  const auto& vb = node(b).val;
  if (va.size() != vb.size()) throw_internal("graph: cmul size mismatch");
  Node n;
  n.op = Op::CMul;
  n.a = a.id;
  n.b = b.id;
  n.val = va;
  for (std::size_t i = 0; i < vb.size(); ++i) n.val[i] *= vb[i];
  return push(std::move(n));
}

Expr Graph::slice(Expr x, std::size_t offset, std::size_t length) {
  const auto& vx = node(x).val;
  if (offset + length > vx.size()) throw_internal("graph: slice out of range");
  Node n;
  n.op = Op::Slice;
  n.a = x.id;
  n.aux = offset;
  n.val.assign(vx.begin() + offset, vx.begin() + offset + length);
  return push(std::move(n));
}

Expr Graph::scale(Expr x, Expr s) {
  const auto& vs = node(s).val;
  if (vs.size() != 1) throw_internal("graph: scale expects a scalar");
  Node n;
  n.op = Op::Scale;
  n.a = x.id;
  n.b = s.id;
  n.val = node(x).val;
  for (double& v : n.val) v *= vs[0];
  return push(std::move(n));
}

std::pair<double, double> Graph::softmax_pair(Expr logits) const {
  const auto& l = node(logits).val;
  if (l.size() != 2) throw_internal("graph: two-way softmax expects 2 logits");
  const double m = std::max(l[0], l[1]);
  const double e0 = std::exp(l[0] - m);
  const double e1 = std::exp(l[1] - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

Expr Graph::nll_two_way(Expr logits, int target) {
  const auto& l = node(logits).val;
  if (l.size() != 2) throw_internal("graph: nll_two_way expects 2 logits");
  if (target != 0 && target != 1) throw_internal("graph: nll_two_way target must be 0 or 1");
  const double m = std::max(l[0], l[1]);
  const double lse = m + std::log(std::exp(l[0] - m) + std::exp(l[1] - m));
  Node n;
  n.op = Op::NllTwoWay;
  n.a = logits.id;
  n.aux = static_cast<std::size_t>(target);
  n.val = {lse - l[target]};
  return push(std::move(n));
}

Expr Graph::prob_one(Expr logits) {
  Node n;
  n.op = Op::ProbOne;
  n.a = logits.id;
  n.val = {softmax_pair(logits).second};
  return push(std::move(n));
}

Expr Graph::weighted_sum(const std::vector<Expr>& scalars, const std::vector<double>& weights) {
  if (scalars.size() != weights.size()) throw_internal("graph: weighted_sum arity mismatch");
  Node n;
  n.op = Op::WeightedSum;
  n.weights = weights;
  double acc = 0.0;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    const auto& v = node(scalars[i]).val;
    if (v.size() != 1) throw_internal("graph: weighted_sum expects scalars");
    n.inputs.push_back(scalars[i].id);
    acc += weights[i] * v[0];
  }
  n.val = {acc};
  return push(std::move(n));
}

const std::vector<double>& Graph::value(Expr e) const { return node(e).val; }

double Graph::scalar(Expr e) const {
  const auto& v = node(e).val;
  if (v.size() != 1) throw_internal("graph: scalar() on non-scalar node");
  return v[0];
}

void Graph::backward(Expr root, double seed) {
  const auto& r = node(root);
  if (r.val.size() != 1) throw_internal("graph: backward root must be a scalar");
  for (auto& n : nodes_) n.adj.assign(n.val.size(), 0.0);
  nodes_[root.id].adj[0] = seed;

  for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
    Node& n = nodes_[id];
    bool live = false;
    for (double a : n.adj) {
      if (a != 0.0) {
        live = true;
        break;
      }
    }
    if (!live) continue;

    switch (n.op) {
      case Op::Constant:
        break;
      case Op::TableRow: {
        double* g = &n.tensor->grad[n.aux * n.tensor->cols];
        for (std::size_t k = 0; k < n.adj.size(); ++k) g[k] += n.adj[k];
        break;
      }
      case Op::Concat: {
        std::size_t offset = 0;
        for (int in_id : n.inputs) {
          Node& x = nodes_[in_id];
          for (std::size_t k = 0; k < x.val.size(); ++k) x.adj[k] += n.adj[offset + k];
          offset += x.val.size();
        }
        break;
      }
      case Op::Affine: {
        Tensor& w = *n.tensor;
        Tensor& b = *n.bias;
        for (std::size_t r2 = 0; r2 < w.rows; ++r2) b.grad[r2] += n.adj[r2];
        std::size_t offset = 0;
        for (int in_id : n.inputs) {
          Node& x = nodes_[in_id];
          const std::size_t len = x.val.size();
          for (std::size_t r2 = 0; r2 < w.rows; ++r2) {
            const double g = n.adj[r2];
            if (g == 0.0) continue;
            double* wg = &w.grad[r2 * w.cols + offset];
            const double* wv = &w.value[r2 * w.cols + offset];
            for (std::size_t k = 0; k < len; ++k) {
              wg[k] += g * x.val[k];
              x.adj[k] += g * wv[k];
            }
          }
          offset += len;
        }
        break;
      }
      case Op::Tanh: {
        Node& x = nodes_[n.a];
        for (std::size_t k = 0; k < n.val.size(); ++k) {
          x.adj[k] += n.adj[k] * (1.0 - n.val[k] * n.val[k]);
        }
        break;
      }
      case Op::Sigmoid: {
        Node& x = nodes_[n.a];
        for (std::size_t k = 0; k < n.val.size(); ++k) {
          x.adj[k] += n.adj[k] * n.val[k] * (1.0 - n.val[k]);
        }
        break;
      }
      case Op::Add: {
        Node& x = nodes_[n.a];
        Node& y = nodes_[n.b];
        for (std::size_t k = 0; k < n.val.size(); ++k) {
          x.adj[k] += n.adj[k];
          y.adj[k] += n.adj[k];
        }
        break;
      }
      case Op::CMul: {
        Node& x = nodes_[n.a];
        Node& y = nodes_[n.b];
        for (std::size_t k = 0; k < n.val.size(); ++k) {
          x.adj[k] += n.adj[k] * y.val[k];
          y.adj[k] += n.adj[k] * x.val[k];
        }
        break;
      }
      case Op::Slice: {
        Node& x = nodes_[n.a];
        for (std::size_t k = 0; k < n.val.size(); ++k) x.adj[n.aux + k] += n.adj[k];
        break;
      }
      case Op::Scale: {
        Node& x = nodes_[n.a];
        Node& s = nodes_[n.b];
        const double sv = s.val[0];
        for (std::size_t k = 0; k < n.val.size(); ++k) {
          x.adj[k] += n.adj[k] * sv;
          s.adj[0] += n.adj[k] * x.val[k];
        }
        break;
      }
      case Op::NllTwoWay: {
        Node& logits = nodes_[n.a];
        const double m = std::max(logits.val[0], logits.val[1]);
        const double e0 = std::exp(logits.val[0] - m);
        const double e1 = std::exp(logits.val[1] - m);
        const double z = e0 + e1;
        const double p0 = e0 / z;
        const double p1 = e1 / z;
        const int target = static_cast<int>(n.aux);
        logits.adj[0] += n.adj[0] * (p0 - (target == 0 ? 1.0 : 0.0));
        logits.adj[1] += n.adj[0] * (p1 - (target == 1 ? 1.0 : 0.0));
        break;
      }
      case Op::ProbOne: {
        Node& logits = nodes_[n.a];
        const double p1 = n.val[0];
        logits.adj[0] += n.adj[0] * (-p1 * (1.0 - p1));
        logits.adj[1] += n.adj[0] * (p1 * (1.0 - p1));
        break;
      }
      case Op::WeightedSum: {
        for (std::size_t i = 0; i < n.inputs.size(); ++i) {
          nodes_[n.inputs[i]].adj[0] += n.adj[0] * n.weights[i];
        }
        break;
      }
    }
  }
}

}  // namespace sumstate
