#pragma once

#include <array>
#include <utility>
#include <vector>

#include "meshcast/dense_matrix.hpp"

namespace meshcast {

/// Unstructured simulation mesh as a graph. norm_adjacency holds the
/// symmetric propagation operator D^{-1/2} (A + I) D^{-1/2} in CSR form with
/// ascending column indices per row, so every sparse product has one fixed
/// summation order. Immutable after construction.
struct MeshGraph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;  // deduplicated, stored with i < j
  std::vector<std::array<double, 2>> node_positions;

  // CSR of the normalized adjacency, self-loops included.
  std::vector<int> row_offsets;
  std::vector<int> col_indices;
  std::vector<double> values;

  int degree(int node) const;  // raw degree, self-loop excluded
};

/// Builds the graph and the Eq.-style normalized operator. Duplicate and
/// reversed-duplicate edges are collapsed; self-loops in the input signal a
/// malformed mesh export and are rejected.
MeshGraph build_mesh_graph(int node_count, const std::vector<std::pair<int, int>>& edges,
                           const std::vector<std::array<double, 2>>& positions);

/// norm_adjacency * features, deterministic per-row summation order.
DenseMatrix spmm(const MeshGraph& graph, const DenseMatrix& features);
void spmm_into(const MeshGraph& graph, const DenseMatrix& features, DenseMatrix& out);

/// out += norm_adjacency * features. out must be preshaped.
void spmm_acc(const MeshGraph& graph, const DenseMatrix& features, DenseMatrix& out);

}  // namespace meshcast
