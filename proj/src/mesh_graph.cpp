#include "meshcast/mesh_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace meshcast {

int MeshGraph::degree(int node) const {
  // Row length minus the self-loop entry.
  return row_offsets[node + 1] - row_offsets[node] - 1;
}

MeshGraph build_mesh_graph(int node_count, const std::vector<std::pair<int, int>>& edges,
                           const std::vector<std::array<double, 2>>& positions) {
  if (node_count <= 0) throw std::invalid_argument("build_mesh_graph: node_count must be positive");
  if (!positions.empty() && static_cast<int>(positions.size()) != node_count) {
    throw std::invalid_argument("build_mesh_graph: positions length does not match node_count");
  }

  MeshGraph graph;
  graph.node_count = node_count;
  graph.node_positions = positions;

  graph.edges.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a == b) {
      throw std::invalid_argument("build_mesh_graph: self-loop on node " + std::to_string(a) +
                                  " (malformed mesh export)");
    }
    if (a < 0 || b < 0 || a >= node_count || b >= node_count) {
      throw std::invalid_argument("build_mesh_graph: edge index out of range");
    }
    graph.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  graph.edges.erase(std::unique(graph.edges.begin(), graph.edges.end()), graph.edges.end());

  // Neighbor lists including the self-loop; degrees from deduplicated edges.
  std::vector<std::vector<int>> neighbors(node_count);
  for (int i = 0; i < node_count; ++i) neighbors[i].push_back(i);
  for (const auto& [a, b] : graph.edges) {
    neighbors[a].push_back(b);
    neighbors[b].push_back(a);
  }

  graph.row_offsets.assign(node_count + 1, 0);
  for (int i = 0; i < node_count; ++i) {
    std::sort(neighbors[i].begin(), neighbors[i].end());
    graph.row_offsets[i + 1] = graph.row_offsets[i] + static_cast<int>(neighbors[i].size());
  }
  graph.col_indices.reserve(graph.row_offsets.back());
  graph.values.reserve(graph.row_offsets.back());
  for (int i = 0; i < node_count; ++i) {
    const double di = static_cast<double>(neighbors[i].size());  // deg_i + 1
    for (int j : neighbors[i]) {
      const double dj = static_cast<double>(neighbors[j].size());
      graph.col_indices.push_back(j);
      graph.values.push_back(1.0 / std::sqrt(di * dj));
    }
  }
  return graph;
}

DenseMatrix spmm(const MeshGraph& graph, const DenseMatrix& features) {
  DenseMatrix out(graph.node_count, features.cols);
  spmm_into(graph, features, out);
  return out;
}

void spmm_into(const MeshGraph& graph, const DenseMatrix& features, DenseMatrix& out) {
  if (features.rows != graph.node_count) {
    throw std::invalid_argument("spmm: feature rows do not match node_count");
  }
  const int cols = features.cols;
  if (out.rows != graph.node_count || out.cols != cols) {
    out = DenseMatrix(graph.node_count, cols);
  }
  for (int i = 0; i < graph.node_count; ++i) {
    double* dst = out.row_ptr(i);
    std::fill(dst, dst + cols, 0.0);
    for (int k = graph.row_offsets[i]; k < graph.row_offsets[i + 1]; ++k) {
      const double w = graph.values[k];
      const double* src = features.row_ptr(graph.col_indices[k]);
      for (int c = 0; c < cols; ++c) dst[c] += w * src[c];
    }
  }
}

void spmm_acc(const MeshGraph& graph, const DenseMatrix& features, DenseMatrix& out) {
  if (features.rows != graph.node_count || out.rows != graph.node_count ||
      out.cols != features.cols) {
    throw std::invalid_argument("spmm_acc: shape mismatch");
  }
  const int cols = features.cols;
  for (int i = 0; i < graph.node_count; ++i) {
    double* dst = out.row_ptr(i);
    for (int k = graph.row_offsets[i]; k < graph.row_offsets[i + 1]; ++k) {
      const double w = graph.values[k];
      const double* src = features.row_ptr(graph.col_indices[k]);
      for (int c = 0; c < cols; ++c) dst[c] += w * src[c];
    }
  }
}

}  // namespace meshcast
