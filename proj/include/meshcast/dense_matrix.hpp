#pragma once

#include <cstddef>
#include <vector>

namespace meshcast {

/// Row-major dense f64 matrix. All model state, features, and gradients use
/// this one shape-checked container.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  DenseMatrix(int r, int c, std::vector<double> values);

  static DenseMatrix identity(int n);
  static DenseMatrix constant(int r, int c, double value);

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  double* row_ptr(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const double* row_ptr(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const DenseMatrix& other) const {
    return rows == other.rows && cols == other.cols;
  }
  bool all_finite() const;
};

/// Exact dense product with a fixed summation order; throws on inner-dimension
/// mismatch.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
void matmul_into(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);

/// out = a^T * b and out = a * b^T, used by the backward pass.
void matmul_at_b_into(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void matmul_a_bt_into(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);

/// Accumulating forms: out += a^T * b, out += a * b^T. out must be preshaped.
void matmul_at_b_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);
void matmul_a_bt_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out);

DenseMatrix transpose(const DenseMatrix& m);

DenseMatrix relu(const DenseMatrix& m);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& m, double factor);

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace meshcast
