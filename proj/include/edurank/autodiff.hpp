#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace edurank {

// Trainable tensor. Gradients accumulate across backward passes until the
// optimizer (or caller) zeroes them.
struct Parameter {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;

  Parameter() = default;
  Parameter(std::string n, Eigen::MatrixXd v)
      : name(std::move(n)), value(std::move(v)), grad(Eigen::MatrixXd::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(); }
};

class Tape;

// Handle into a Tape's node list. Cheap to copy; valid only for the tape that
// produced it and only until that tape is destroyed or reset.
struct Var {
  int idx = -1;
  bool valid() const { return idx >= 0; }
};

// Reverse-mode autodiff over dense matrices. Build the graph with the op
// methods, then call backward() on a 1x1 result; parameter gradients land in
// Parameter::grad.
class Tape {
 public:
  Var constant(Eigen::MatrixXd value);
  Var param(Parameter& p);

  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var add(Var a, Var b);
  // a + alpha * b (same shapes).
  Var add_scaled(Var a, Var b, double alpha);
  // Adds a 1xN row vector to every row of a.
  Var add_row_broadcast(Var a, Var row);
  Var scale(Var a, double s);
  Var relu(Var a);
  // Softmax along each row / each column, with max-subtraction.
  Var softmax_rows(Var a);
  Var softmax_cols(Var a);
  Var slice_rows(Var a, int start, int count);
  // Row i of the result is row indices[i] of a; repeated indices accumulate
  // gradient.
  Var gather_rows(Var a, std::vector<int> indices);
  Var concat_rows(const std::vector<Var>& parts);
  // Column j as an Mx1 matrix.
  Var col(Var a, int j);
  // Mx1 result; entry i is the mean of row i.
  Var mean_cols(Var a);
  // v is Mx1. Mean over pairs (i, j) of softplus(-(v_i - v_j)), i.e. the
  // pairwise logistic loss -log sigmoid(v_i - v_j) encouraging v_i > v_j.
  // Empty pair list gives the constant 0.
  Var pair_softplus_mean(Var v, std::vector<std::pair<int, int>> pairs);

  void backward(Var root);

  const Eigen::MatrixXd& value(Var v) const;
  const Eigen::MatrixXd& grad(Var v) const;
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;
    std::function<void(Tape&, int)> backprop;  // (tape, own index)
    Parameter* param = nullptr;
  };

  int push(Eigen::MatrixXd value, std::function<void(Tape&, int)> backprop,
           Parameter* param = nullptr);
  Eigen::MatrixXd& grad_buf(int idx);
  void check(Var v) const;

  std::vector<Node> nodes_;
};

}  // namespace edurank
