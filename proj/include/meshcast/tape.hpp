#pragma once

#include <vector>

#include "meshcast/dense_matrix.hpp"
#include "meshcast/mesh_graph.hpp"

namespace meshcast {

enum class Activation { Relu, Tanh, Identity };

DenseMatrix apply_activation(const DenseMatrix& x, Activation act);

/// Reverse-mode tape over dense matrices. Records the primitives the emulator
/// needs (matmul, spmm, bias, activation, concat/slice, scale, subtract,
/// square-mean) with full intermediate values; backward() walks the nodes in
/// strict reverse order once and accumulates adjoints deterministically.
/// A tape is confined to one worker; independent tapes may run in parallel.
class Tape {
 public:
  using NodeId = int;

  NodeId input(DenseMatrix value);  // constant leaf
  NodeId param(DenseMatrix value);  // differentiable leaf

  NodeId matmul(NodeId a, NodeId b);
  NodeId spmm(const MeshGraph& graph, NodeId x);  // graph must outlive the tape
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId add_bias(NodeId x, NodeId bias);  // bias is 1 x C, broadcast over rows
  NodeId activation(NodeId x, Activation act);
  NodeId concat_cols(const std::vector<NodeId>& parts);
  NodeId slice_cols(NodeId x, int first, int count);
  NodeId scale(NodeId x, double factor);
  NodeId square_mean(NodeId x);  // mean of squared entries, 1 x 1

  const DenseMatrix& value(NodeId id) const { return nodes_[check(id)].value; }
  double scalar(NodeId id) const;

  /// Seeds the adjoint of a scalar loss node and back-propagates. Parameters
  /// that do not reach the loss keep zero gradients.
  void backward(NodeId loss);

  /// Adjoint of a node after backward().
  const DenseMatrix& grad(NodeId id) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op {
    Input,
    Param,
    Matmul,
    Spmm,
    Add,
    Sub,
    AddBias,
    Activation,
    ConcatCols,
    SliceCols,
    Scale,
    SquareMean,
  };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    std::vector<int> parts;  // ConcatCols only
    const MeshGraph* graph = nullptr;
    Activation act = Activation::Relu;
    double factor = 0.0;
    int slice_first = 0;
    DenseMatrix value;
    DenseMatrix grad;
  };

  int check(NodeId id) const;
  NodeId push(Node node);

  std::vector<Node> nodes_;
  bool ran_backward_ = false;
};

}  // namespace meshcast
