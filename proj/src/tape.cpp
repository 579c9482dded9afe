#include "meshcast/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace meshcast {

DenseMatrix apply_activation(const DenseMatrix& x, Activation act) {
  switch (act) {
    case Activation::Relu:
      return relu(x);
    case Activation::Tanh: {
      DenseMatrix out = x;
      for (double& v : out.data) v = std::tanh(v);
      return out;
    }
    case Activation::Identity:
      return x;
  }
  throw std::logic_error("apply_activation: unknown activation");
}

int Tape::check(NodeId id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size())) {
    throw std::out_of_range("Tape: bad node id");
  }
  return id;
}

Tape::NodeId Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

Tape::NodeId Tape::input(DenseMatrix value) {
  Node n;
  n.op = Op::Input;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::NodeId Tape::param(DenseMatrix value) {
  Node n;
  n.op = Op::Param;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  Node n;
  n.op = Op::Matmul;
  n.a = check(a);
  n.b = check(b);
  n.value = meshcast::matmul(nodes_[a].value, nodes_[b].value);
  return push(std::move(n));
}

Tape::NodeId Tape::spmm(const MeshGraph& graph, NodeId x) {
  Node n;
  n.op = Op::Spmm;
  n.a = check(x);
  n.graph = &graph;
  n.value = meshcast::spmm(graph, nodes_[x].value);
  return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  Node n;
  n.op = Op::Add;
  n.a = check(a);
  n.b = check(b);
  n.value = meshcast::add(nodes_[a].value, nodes_[b].value);
  return push(std::move(n));
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
  Node n;
  n.op = Op::Sub;
  n.a = check(a);
  n.b = check(b);
  n.value = meshcast::sub(nodes_[a].value, nodes_[b].value);
  return push(std::move(n));
}

Tape::NodeId Tape::add_bias(NodeId x, NodeId bias) {
  const DenseMatrix& xv = nodes_[check(x)].value;
  const DenseMatrix& bv = nodes_[check(bias)].value;
  if (bv.rows != 1 || bv.cols != xv.cols) {
    throw std::invalid_argument("add_bias: bias must be 1 x cols(x)");
  }
  Node n;
  n.op = Op::AddBias;
  n.a = x;
  n.b = bias;
  n.value = xv;
  for (int r = 0; r < xv.rows; ++r) {
    double* row = n.value.row_ptr(r);
    for (int c = 0; c < xv.cols; ++c) row[c] += bv.data[c];
  }
  return push(std::move(n));
}

Tape::NodeId Tape::activation(NodeId x, Activation act) {
  Node n;
  n.op = Op::Activation;
  n.a = check(x);
  n.act = act;
  n.value = apply_activation(nodes_[x].value, act);
  return push(std::move(n));
}

Tape::NodeId Tape::concat_cols(const std::vector<NodeId>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  int cols = 0;
  const int rows = nodes_[check(parts.front())].value.rows;
  for (NodeId p : parts) {
    const DenseMatrix& v = nodes_[check(p)].value;
    if (v.rows != rows) throw std::invalid_argument("concat_cols: row counts differ");
    cols += v.cols;
  }
  Node n;
  n.op = Op::ConcatCols;
  n.parts.assign(parts.begin(), parts.end());
  n.value = DenseMatrix(rows, cols);
  int offset = 0;
  for (NodeId p : parts) {
    const DenseMatrix& v = nodes_[p].value;
    for (int r = 0; r < rows; ++r) {
      const double* src = v.row_ptr(r);
      double* dst = n.value.row_ptr(r) + offset;
      for (int c = 0; c < v.cols; ++c) dst[c] = src[c];
    }
    offset += v.cols;
  }
  return push(std::move(n));
}

Tape::NodeId Tape::slice_cols(NodeId x, int first, int count) {
  const DenseMatrix& xv = nodes_[check(x)].value;
  if (first < 0 || count <= 0 || first + count > xv.cols) {
    throw std::invalid_argument("slice_cols: range out of bounds");
  }
  Node n;
  n.op = Op::SliceCols;
  n.a = x;
  n.slice_first = first;
  n.value = DenseMatrix(xv.rows, count);
  for (int r = 0; r < xv.rows; ++r) {
    const double* src = xv.row_ptr(r) + first;
    double* dst = n.value.row_ptr(r);
    for (int c = 0; c < count; ++c) dst[c] = src[c];
  }
  return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId x, double factor) {
  Node n;
  n.op = Op::Scale;
  n.a = check(x);
  n.factor = factor;
  n.value = meshcast::scale(nodes_[x].value, factor);
  return push(std::move(n));
}

Tape::NodeId Tape::square_mean(NodeId x) {
  const DenseMatrix& xv = nodes_[check(x)].value;
  if (xv.size() == 0) throw std::invalid_argument("square_mean: empty input");
  Node n;
  n.op = Op::SquareMean;
  n.a = x;
  double sum = 0.0;
  for (double v : xv.data) sum += v * v;
  n.value = DenseMatrix(1, 1);
  n.value.data[0] = sum / static_cast<double>(xv.size());
  return push(std::move(n));
}

double Tape::scalar(NodeId id) const {
  const DenseMatrix& v = value(id);
  if (v.rows != 1 || v.cols != 1) throw std::invalid_argument("scalar: node is not 1x1");
  return v.data[0];
}

const DenseMatrix& Tape::grad(NodeId id) const {
  if (!ran_backward_) throw std::logic_error("Tape::grad: backward() has not run");
  return nodes_[check(id)].grad;
}

void Tape::backward(NodeId loss) {
  const int loss_id = check(loss);
  const DenseMatrix& lv = nodes_[loss_id].value;
  if (lv.rows != 1 || lv.cols != 1) {
    throw std::invalid_argument("backward: loss node must be scalar");
  }

  // Mark the subgraph feeding the loss so dead branches stay zero-cost.
  std::vector<char> live(nodes_.size(), 0);
  live[loss_id] = 1;
  for (int i = loss_id; i >= 0; --i) {
    if (!live[i]) continue;
    const Node& n = nodes_[i];
    if (n.a >= 0) live[n.a] = 1;
    if (n.b >= 0) live[n.b] = 1;
    for (int p : n.parts) live[p] = 1;
  }

  for (auto& n : nodes_) {
    n.grad = DenseMatrix(n.value.rows, n.value.cols);
  }
  nodes_[loss_id].grad.data[0] = 1.0;

  for (int i = loss_id; i >= 0; --i) {
    if (!live[i]) continue;
    Node& n = nodes_[i];
    const DenseMatrix& g = n.grad;
    switch (n.op) {
      case Op::Input:
      case Op::Param:
        break;
      case Op::Matmul:
        matmul_a_bt_acc(g, nodes_[n.b].value, nodes_[n.a].grad);
        matmul_at_b_acc(nodes_[n.a].value, g, nodes_[n.b].grad);
        break;
      case Op::Spmm:
        // norm_adjacency is symmetric, so the transpose product is the same spmm.
        spmm_acc(*n.graph, g, nodes_[n.a].grad);
        break;
      case Op::Add: {
        auto& ga = nodes_[n.a].grad;
        auto& gb = nodes_[n.b].grad;
        for (std::size_t k = 0; k < g.data.size(); ++k) {
          ga.data[k] += g.data[k];
          gb.data[k] += g.data[k];
        }
        break;
      }
      case Op::Sub: {
        auto& ga = nodes_[n.a].grad;
        auto& gb = nodes_[n.b].grad;
        for (std::size_t k = 0; k < g.data.size(); ++k) {
          ga.data[k] += g.data[k];
          gb.data[k] -= g.data[k];
        }
        break;
      }
      case Op::AddBias: {
        auto& gx = nodes_[n.a].grad;
        auto& gb = nodes_[n.b].grad;
        for (std::size_t k = 0; k < g.data.size(); ++k) gx.data[k] += g.data[k];
        for (int r = 0; r < g.rows; ++r) {
          const double* row = g.row_ptr(r);
          for (int c = 0; c < g.cols; ++c) gb.data[c] += row[c];
        }
        break;
      }
      case Op::Activation: {
        auto& gx = nodes_[n.a].grad;
        const DenseMatrix& xin = nodes_[n.a].value;
        switch (n.act) {
          case Activation::Relu:
            // Subgradient at 0 is 0.
            for (std::size_t k = 0; k < g.data.size(); ++k) {
              if (xin.data[k] > 0.0) gx.data[k] += g.data[k];
            }
            break;
          case Activation::Tanh:
            for (std::size_t k = 0; k < g.data.size(); ++k) {
              const double y = n.value.data[k];
              gx.data[k] += g.data[k] * (1.0 - y * y);
            }
            break;
          case Activation::Identity:
            for (std::size_t k = 0; k < g.data.size(); ++k) gx.data[k] += g.data[k];
            break;
        }
        break;
      }
      case Op::ConcatCols: {
        int offset = 0;
        for (int p : n.parts) {
          auto& gp = nodes_[p].grad;
          for (int r = 0; r < g.rows; ++r) {
            const double* src = g.row_ptr(r) + offset;
            double* dst = gp.row_ptr(r);
            for (int c = 0; c < gp.cols; ++c) dst[c] += src[c];
          }
          offset += gp.cols;
        }
        break;
      }
      case Op::SliceCols: {
        auto& gx = nodes_[n.a].grad;
        for (int r = 0; r < g.rows; ++r) {
          const double* src = g.row_ptr(r);
          double* dst = gx.row_ptr(r) + n.slice_first;
          for (int c = 0; c < g.cols; ++c) dst[c] += src[c];
        }
        break;
      }
      case Op::Scale: {
        auto& gx = nodes_[n.a].grad;
        for (std::size_t k = 0; k < g.data.size(); ++k) gx.data[k] += n.factor * g.data[k];
        break;
      }
      case Op::SquareMean: {
        auto& gx = nodes_[n.a].grad;
        const DenseMatrix& xin = nodes_[n.a].value;
        const double w = 2.0 * g.data[0] / static_cast<double>(xin.size());
        for (std::size_t k = 0; k < gx.data.size(); ++k) gx.data[k] += w * xin.data[k];
        break;
      }
    }
  }
  ran_backward_ = true;
}

}  // namespace meshcast
