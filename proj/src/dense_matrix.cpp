#include "meshcast/dense_matrix.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace meshcast {

namespace {

using EigenMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using EigenConstMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

EigenConstMap map(const DenseMatrix& m) { return EigenConstMap(m.data.data(), m.rows, m.cols); }
EigenMap map(DenseMatrix& m) { return EigenMap(m.data.data(), m.rows, m.cols); }

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace

DenseMatrix::DenseMatrix(int r, int c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != static_cast<std::size_t>(r) * c) {
    throw std::invalid_argument("DenseMatrix: data length does not match rows*cols");
  }
}

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::constant(int r, int c, double value) {
  DenseMatrix m(r, c);
  std::fill(m.data.begin(), m.data.end(), value);
  return m;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows, b.cols);
  matmul_into(a, b, out);
  return out;
}

void matmul_into(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dimensions differ");
  if (out.rows != a.rows || out.cols != b.cols) out = DenseMatrix(a.rows, b.cols);
  map(out).noalias() = map(a) * map(b);
}

void matmul_at_b_into(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  if (a.rows != b.rows) throw std::invalid_argument("matmul_at_b: outer dimensions differ");
  if (out.rows != a.cols || out.cols != b.cols) out = DenseMatrix(a.cols, b.cols);
  map(out).noalias() = map(a).transpose() * map(b);
}

void matmul_a_bt_into(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  if (a.cols != b.cols) throw std::invalid_argument("matmul_a_bt: inner dimensions differ");
  if (out.rows != a.rows || out.cols != b.rows) out = DenseMatrix(a.rows, b.rows);
  map(out).noalias() = map(a) * map(b).transpose();
}

void matmul_at_b_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  if (a.rows != b.rows || out.rows != a.cols || out.cols != b.cols) {
    throw std::invalid_argument("matmul_at_b_acc: shape mismatch");
  }
  map(out).noalias() += map(a).transpose() * map(b);
}

void matmul_a_bt_acc(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  if (a.cols != b.cols || out.rows != a.rows || out.cols != b.rows) {
    throw std::invalid_argument("matmul_a_bt_acc: shape mismatch");
  }
  map(out).noalias() += map(a) * map(b).transpose();
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix out(m.cols, m.rows);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) out.at(c, r) = m.at(r, c);
  }
  return out;
}

DenseMatrix relu(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "add");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "sub");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

DenseMatrix scale(const DenseMatrix& m, double factor) {
  DenseMatrix out = m;
  for (double& v : out.data) v *= factor;
  return out;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  }
  return worst;
}

}  // namespace meshcast
