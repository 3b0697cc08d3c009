#include "edurank/autodiff.hpp"

#include <cmath>

#include "edurank/errors.hpp"

namespace edurank {

namespace {

double softplus(double x) {
  // log(1 + e^x) without overflow for large |x|.
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::MatrixXd softmax_rows_value(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd y(a.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    double m = a.row(r).maxCoeff();
    Eigen::ArrayXd e = (a.row(r).array() - m).exp();
    y.row(r) = (e / e.sum()).matrix();
  }
  return y;
}

}  // namespace

int Tape::push(Eigen::MatrixXd value, std::function<void(Tape&, int)> backprop, Parameter* param) {
  Node n;
  n.value = std::move(value);
  n.backprop = std::move(backprop);
  n.param = param;
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void Tape::check(Var v) const {
  if (v.idx < 0 || v.idx >= static_cast<int>(nodes_.size()))
    throw ContractViolation("autodiff: variable does not belong to this tape");
}

Eigen::MatrixXd& Tape::grad_buf(int idx) {
  Node& n = nodes_[static_cast<std::size_t>(idx)];
  if (n.grad.size() == 0) n.grad = Eigen::MatrixXd::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

const Eigen::MatrixXd& Tape::value(Var v) const {
  check(v);
  return nodes_[static_cast<std::size_t>(v.idx)].value;
}

const Eigen::MatrixXd& Tape::grad(Var v) const {
  check(v);
  const Node& n = nodes_[static_cast<std::size_t>(v.idx)];
  if (n.grad.size() == 0)
    throw ContractViolation("autodiff: gradient not computed for this variable");
  return n.grad;
}

Var Tape::constant(Eigen::MatrixXd value) { return {push(std::move(value), nullptr)}; }

Var Tape::param(Parameter& p) { return {push(p.value, nullptr, &p)}; }

Var Tape::matmul(Var a, Var b) {
  check(a);
  check(b);
  const Eigen::MatrixXd& A = value(a);
  const Eigen::MatrixXd& B = value(b);
  if (A.cols() != B.rows()) throw ContractViolation("autodiff: matmul shape mismatch");
  int ai = a.idx, bi = b.idx;
  return {push(A * B, [ai, bi](Tape& t, int self) {
    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(self)].grad;
    t.grad_buf(ai) += g * t.nodes_[static_cast<std::size_t>(bi)].value.transpose();
    t.grad_buf(bi) += t.nodes_[static_cast<std::size_t>(ai)].value.transpose() * g;
  })};
}

Var Tape::transpose(Var a) {
  check(a);
  int ai = a.idx;
  return {push(value(a).transpose(), [ai](Tape& t, int self) {
    t.grad_buf(ai) += t.nodes_[static_cast<std::size_t>(self)].grad.transpose();
  })};
}

Var Tape::add(Var a, Var b) {
  check(a);
  check(b);
  const Eigen::MatrixXd& A = value(a);
  const Eigen::MatrixXd& B = value(b);
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw ContractViolation("autodiff: add shape mismatch");
  int ai = a.idx, bi = b.idx;
  return {push(A + B, [ai, bi](Tape& t, int self) {
    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(self)].grad;
    t.grad_buf(ai) += g;
    t.grad_buf(bi) += g;
  })};
}

Var Tape::add_scaled(Var a, Var b, double alpha) {
  check(a);
  check(b);
  const Eigen::MatrixXd& A = value(a);
  const Eigen::MatrixXd& B = value(b);
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw ContractViolation("autodiff: add_scaled shape mismatch");
  int ai = a.idx, bi = b.idx;
  return {push(A + alpha * B, [ai, bi, alpha](Tape& t, int self) {
    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(self)].grad;
    t.grad_buf(ai) += g;
    t.grad_buf(bi) += alpha * g;
  })};
}

Var Tape::add_row_broadcast(Var a, Var row) {
  check(a);
  check(row);
  const Eigen::MatrixXd& A = value(a);
  const Eigen::MatrixXd& R = value(row);
  if (R.rows() != 1 || R.cols() != A.cols())
    throw ContractViolation("autodiff: broadcast row must be 1 x cols(a)");
  int ai = a.idx, ri = row.idx;
  Eigen::MatrixXd out = A;
  out.rowwise() += R.row(0);
  return {push(std::move(out), [ai, ri](Tape& t, int self) {
    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(self)].grad;
    t.grad_buf(ai) += g;
    t.grad_buf(ri) += g.colwise().sum();
  })};
}

Var Tape::scale(Var a, double s) {
  check(a);
  int ai = a.idx;
  return {push(value(a) * s, [ai, s](Tape& t, int self) {
    t.grad_buf(ai) += s * t.nodes_[static_cast<std::size_t>(self)].grad;
  })};
}

Var Tape::relu(Var a) {
  check(a);
  int ai = a.idx;
  return {push(value(a).cwiseMax(0.0), [ai](Tape& t, int self) {
    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(self)].grad;
    const Eigen::MatrixXd& x = t.nodes_[static_cast<std::size_t>(ai)].value;
    t.grad_buf(ai).array() += g.array() * (x.array() > 0.0).cast<double>();
  })};
}

Var Tape::softmax_rows(Var a) {
  check(a);
  int ai = a.idx;
  return {push(softmax_rows_value(value(a)), [ai](Tape& t, int self) {
    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(self)].grad;
    const Eigen::MatrixXd& y = t.nodes_[static_cast<std::size_t>(self)].value;
    Eigen::MatrixXd& da = t.grad_buf(ai);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      double dot = g.row(r).cwiseProduct(y.row(r)).sum();
      da.row(r).array() += y.row(r).array() * (g.row(r).array() - dot);
    }
  })};
}

Var Tape::softmax_cols(Var a) {
  check(a);
  int ai = a.idx;
  return {push(softmax_rows_value(value(a).transpose()).transpose(), [ai](Tape& t, int self) {
    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(self)].grad;
    const Eigen::MatrixXd& y = t.nodes_[static_cast<std::size_t>(self)].value;
    Eigen::MatrixXd& da = t.grad_buf(ai);
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      double dot = g.col(c).cwiseProduct(y.col(c)).sum();
      da.col(c).array() += y.col(c).array() * (g.col(c).array() - dot);
    }
  })};
}

Var Tape::slice_rows(Var a, int start, int count) {
  check(a);
  const Eigen::MatrixXd& A = value(a);
  if (start < 0 || count < 1 || start + count > A.rows())
    throw ContractViolation("autodiff: slice_rows out of range");
  int ai = a.idx;
  return {push(A.middleRows(start, count), [ai, start, count](Tape& t, int self) {
    t.grad_buf(ai).middleRows(start, count) += t.nodes_[static_cast<std::size_t>(self)].grad;
  })};
}

Var Tape::gather_rows(Var a, std::vector<int> indices) {
  check(a);
  const Eigen::MatrixXd& A = value(a);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), A.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= A.rows())
      throw ContractViolation("autodiff: gather_rows index out of range");
    out.row(static_cast<Eigen::Index>(i)) = A.row(indices[i]);
  }
  int ai = a.idx;
  return {push(std::move(out), [ai, indices = std::move(indices)](Tape& t, int self) {
    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(self)].grad;
    Eigen::MatrixXd& da = t.grad_buf(ai);
    for (std::size_t i = 0; i < indices.size(); ++i)
      da.row(indices[i]) += g.row(static_cast<Eigen::Index>(i));
  })};
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ContractViolation("autodiff: concat_rows of nothing");
  Eigen::Index cols = value(parts[0]).cols();
  Eigen::Index rows = 0;
  std::vector<int> idxs;
  idxs.reserve(parts.size());
  for (Var p : parts) {
    check(p);
    if (value(p).cols() != cols)
      throw ContractViolation("autodiff: concat_rows column mismatch");
    rows += value(p).rows();
    idxs.push_back(p.idx);
  }
  Eigen::MatrixXd out(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    out.middleRows(at, value(p).rows()) = value(p);
    at += value(p).rows();
  }
  return {push(std::move(out), [idxs = std::move(idxs)](Tape& t, int self) {
    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(self)].grad;
    Eigen::Index at = 0;
    for (int pi : idxs) {
      Eigen::Index r = t.nodes_[static_cast<std::size_t>(pi)].value.rows();
      t.grad_buf(pi) += g.middleRows(at, r);
      at += r;
    }
  })};
}

Var Tape::col(Var a, int j) {
  check(a);
  const Eigen::MatrixXd& A = value(a);
  if (j < 0 || j >= A.cols()) throw ContractViolation("autodiff: col index out of range");
  int ai = a.idx;
  return {push(A.col(j), [ai, j](Tape& t, int self) {
    t.grad_buf(ai).col(j) += t.nodes_[static_cast<std::size_t>(self)].grad;
  })};
}

Var Tape::mean_cols(Var a) {
  check(a);
  const Eigen::MatrixXd& A = value(a);
  double inv = 1.0 / static_cast<double>(A.cols());
  int ai = a.idx;
  return {push(A.rowwise().mean(), [ai, inv](Tape& t, int self) {
    const Eigen::MatrixXd& g = t.nodes_[static_cast<std::size_t>(self)].grad;
    Eigen::MatrixXd& da = t.grad_buf(ai);
    da.colwise() += (inv * g).col(0);
  })};
}

Var Tape::pair_softplus_mean(Var v, std::vector<std::pair<int, int>> pairs) {
  check(v);
  const Eigen::MatrixXd& V = value(v);
  if (V.cols() != 1) throw ContractViolation("autodiff: pair_softplus_mean expects a column");
  Eigen::MatrixXd out(1, 1);
  if (pairs.empty()) {
    out(0, 0) = 0.0;
    return {push(std::move(out), nullptr)};
  }
  double acc = 0.0;
  for (const auto& [i, j] : pairs) {
    if (i < 0 || i >= V.rows() || j < 0 || j >= V.rows())
      throw ContractViolation("autodiff: pair index out of range");
    acc += softplus(-(V(i, 0) - V(j, 0)));
  }
  out(0, 0) = acc / static_cast<double>(pairs.size());
  int vi = v.idx;
  return {push(std::move(out), [vi, pairs = std::move(pairs)](Tape& t, int self) {
    double g = t.nodes_[static_cast<std::size_t>(self)].grad(0, 0);
    const Eigen::MatrixXd& V = t.nodes_[static_cast<std::size_t>(vi)].value;
    Eigen::MatrixXd& dv = t.grad_buf(vi);
    double inv = 1.0 / static_cast<double>(pairs.size());
    for (const auto& [i, j] : pairs) {
      // d/dv_i of softplus(-(v_i - v_j)) = sigmoid(v_i - v_j) - 1.
      double s = sigmoid(V(i, 0) - V(j, 0));
      dv(i, 0) += g * (s - 1.0) * inv;
      dv(j, 0) += g * (1.0 - s) * inv;
    }
  })};
}

void Tape::backward(Var root) {
  check(root);
  const Eigen::MatrixXd& rv = value(root);
  if (rv.rows() != 1 || rv.cols() != 1)
    throw ContractViolation("autodiff: backward requires a 1x1 scalar root");
  grad_buf(root.idx)(0, 0) += 1.0;
  for (int i = root.idx; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.grad.size() == 0) continue;  // no gradient reached this node
    if (n.backprop) n.backprop(*this, i);
    if (n.param) n.param->grad += n.grad;
  }
}

}  // namespace edurank
