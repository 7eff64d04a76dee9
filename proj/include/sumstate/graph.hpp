#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sumstate {

// A named parameter matrix (rows x cols, row-major). Vectors are column
// matrices. Gradients accumulate across backward passes until zeroed.
struct Tensor {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 1;
  std::vector<double> value;
  std::vector<double> grad;

  Tensor() = default;
  Tensor(std::string n, std::size_t r, std::size_t c)
      : name(std::move(n)), rows(r), cols(c), value(r * c, 0.0), grad(r * c, 0.0) {}

  std::size_t size() const { return rows * cols; }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

// Handle into a Graph node.
struct Expr {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Dynamic reverse-mode tape over double vectors. A graph is built per
// document, evaluated eagerly, and swept once by backward(); parameter
// gradients accumulate into Tensor::grad.
class Graph {
 public:
  Graph() = default;

  Expr constant(std::vector<double> value);
  Expr zeros(std::size_t n);
  // Row `row` of an embedding-style table; gradients flow into that row.
  Expr table_row(Tensor& table, std::size_t row);
  // W * concat(inputs) + b. W is rows x (sum of input sizes), b is rows x 1.
  Expr affine(Tensor& weight, Tensor& bias, const std::vector<Expr>& inputs);
  Expr concat(const std::vector<Expr>& inputs);
  Expr tanh_of(Expr x);
  Expr sigmoid_of(Expr x);
  Expr add(Expr a, Expr b);
  Expr cmul(Expr a, Expr b);
  Expr slice(Expr x, std::size_t offset, std::size_t length);
  // Broadcast multiply of vector x by 1-dim scalar s.
  Expr scale(Expr x, Expr s);
  // Scalar -log softmax(logits)[target] over two logits, numerically stable.
  Expr nll_two_way(Expr logits, int target);
  // Scalar softmax(logits)[1] over two logits; differentiable.
  Expr prob_one(Expr logits);
  // Scalar sum_i weights[i] * scalars[i].
  Expr weighted_sum(const std::vector<Expr>& scalars, const std::vector<double>& weights);

  const std::vector<double>& value(Expr e) const;
  double scalar(Expr e) const;
  // Forward-only probabilities (p0, p1) of a two-way softmax node input.
  std::pair<double, double> softmax_pair(Expr logits) const;

  // Reverse sweep from `root` (a scalar) with the given seed adjoint.
  void backward(Expr root, double seed = 1.0);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    Constant,
    TableRow,
    Concat,
    Affine,
    Tanh,
    Sigmoid,
    Add,
    CMul,
    Slice,
    Scale,
    NllTwoWay,
    ProbOne,
    WeightedSum,
  };

  struct Node {
    Op op = Op::Constant;
    int a = -1;
    int b = -1;
    std::vector<int> inputs;      // Affine, WeightedSum
    std::vector<double> weights;  // WeightedSum
    Tensor* tensor = nullptr;     // Affine weight, TableRow table
    Tensor* bias = nullptr;       // Affine bias
    std::size_t aux = 0;          // TableRow row, Slice offset, NllTwoWay target
    std::vector<double> val;
    std::vector<double> adj;
  };

  Expr push(Node node);
  const Node& node(Expr e) const;

  std::vector<Node> nodes_;
};

}  // namespace sumstate
