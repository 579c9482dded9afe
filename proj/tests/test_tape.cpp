#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "meshcast/grad_check.hpp"
#include "meshcast/mesh_graph.hpp"
#include "meshcast/rng.hpp"
#include "meshcast/tape.hpp"

using namespace meshcast;

namespace {

DenseMatrix random_matrix(int r, int c, Rng& rng, double scale = 1.0) {
  DenseMatrix m(r, c);
  for (double& v : m.data) v = scale * rng.normal();
  return m;
}

}  // namespace

TEST_CASE("matmul basics") {
  DenseMatrix a(2, 2, {1, 2, 3, 4});
  CHECK(matmul(a, DenseMatrix::identity(2)).data == a.data);

  DenseMatrix row(1, 2, {1, 2});
  DenseMatrix col(2, 1, {3, 5});
  CHECK(matmul(row, col).at(0, 0) == doctest::Approx(13.0));

  const DenseMatrix zero = matmul(a, DenseMatrix(2, 3));
  for (double v : zero.data) CHECK(v == 0.0);

  CHECK_THROWS_AS(matmul(a, DenseMatrix(3, 2)), std::invalid_argument);
}

TEST_CASE("relu splits signs and passes positives through") {
  DenseMatrix x(1, 2, {-1.0, 2.0});
  const DenseMatrix y = relu(x);
  CHECK(y.at(0, 0) == 0.0);
  CHECK(y.at(0, 1) == 2.0);
  const DenseMatrix z = relu(DenseMatrix(2, 2));
  for (double v : z.data) CHECK(v == 0.0);
  DenseMatrix p(1, 1, {3.5});
  CHECK(relu(p).at(0, 0) == 3.5);
}

TEST_CASE("backward reproduces the analytic derivative of a scalar least-squares") {
  // loss = mean((W*x - y)^2), W = [[1]], x = [2], y = [0]  ->  dL/dW = 2*(Wx-y)*x = 8
  Tape tape;
  const auto w = tape.param(DenseMatrix(1, 1, {1.0}));
  const auto x = tape.input(DenseMatrix(1, 1, {2.0}));
  const auto y = tape.input(DenseMatrix(1, 1, {0.0}));
  const auto loss = tape.square_mean(tape.sub(tape.matmul(w, x), y));
  CHECK(tape.scalar(loss) == doctest::Approx(4.0));
  tape.backward(loss);
  CHECK(tape.grad(w).at(0, 0) == doctest::Approx(8.0));
}

TEST_CASE("parameters off the loss path get zero gradients") {
  Tape tape;
  const auto used = tape.param(DenseMatrix(1, 1, {3.0}));
  const auto unused = tape.param(DenseMatrix(2, 2, {1, 2, 3, 4}));
  const auto loss = tape.square_mean(used);
  tape.backward(loss);
  CHECK(tape.grad(used).at(0, 0) == doctest::Approx(6.0));
  for (double v : tape.grad(unused).data) CHECK(v == 0.0);
}

TEST_CASE("relu subgradient is zero at and below zero") {
  Tape tape;
  const auto x = tape.param(DenseMatrix(1, 3, {-2.0, 0.0, 2.0}));
  const auto loss = tape.square_mean(tape.activation(x, Activation::Relu));
  tape.backward(loss);
  CHECK(tape.grad(x).at(0, 0) == 0.0);
  CHECK(tape.grad(x).at(0, 1) == 0.0);
  CHECK(tape.grad(x).at(0, 2) == doctest::Approx(2.0 * 2.0 / 3.0));
}

TEST_CASE("backward rejects non-scalar losses and is deterministic") {
  Rng rng(17);
  const DenseMatrix w0 = random_matrix(3, 3, rng);
  const DenseMatrix x0 = random_matrix(4, 3, rng);

  auto run = [&]() {
    Tape tape;
    const auto w = tape.param(w0);
    const auto x = tape.input(x0);
    const auto loss = tape.square_mean(tape.activation(tape.matmul(x, w), Activation::Relu));
    tape.backward(loss);
    return tape.grad(w).data;
  };
  CHECK(run() == run());

  Tape bad;
  const auto w = bad.param(w0);
  const auto y = bad.matmul(bad.input(x0), w);
  CHECK_THROWS_AS(bad.backward(y), std::invalid_argument);
}

TEST_CASE("every recorded primitive matches central differences") {
  Rng rng(23);
  const MeshGraph graph = build_mesh_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {1, 3}}, {});
  const DenseMatrix x0 = random_matrix(5, 3, rng);
  std::vector<DenseMatrix> params = {random_matrix(3, 4, rng), random_matrix(1, 4, rng),
                                     random_matrix(4, 2, rng)};

  // One expression exercising matmul, spmm, add, sub, add_bias, relu, tanh,
  // concat, slice, scale, and square_mean.
  auto build = [&](Tape& tape, const std::vector<DenseMatrix>& p,
                   std::vector<Tape::NodeId>& ids) {
    ids.clear();
    for (const auto& m : p) ids.push_back(tape.param(m));
    const auto x = tape.input(x0);
    const auto h1 = tape.add_bias(tape.matmul(tape.spmm(graph, x), ids[0]), ids[1]);
    const auto h2 = tape.activation(h1, Activation::Relu);
    const auto h3 = tape.activation(tape.scale(h1, 0.5), Activation::Tanh);
    const auto joined = tape.concat_cols({h2, h3});
    const auto sliced = tape.slice_cols(joined, 2, 4);
    const auto out = tape.matmul(tape.sub(sliced, tape.scale(sliced, 0.25)), ids[2]);
    return tape.add(tape.square_mean(out), tape.scale(tape.square_mean(h3), 0.5));
  };

  Tape tape;
  std::vector<Tape::NodeId> ids;
  const auto loss = build(tape, params, ids);
  tape.backward(loss);
  std::vector<DenseMatrix> grads;
  for (auto id : ids) grads.push_back(tape.grad(id));

  const auto f = [&](const std::vector<DenseMatrix>& p) {
    Tape t;
    std::vector<Tape::NodeId> scratch;
    return t.scalar(build(t, p, scratch));
  };

  const GradCheckReport report = finite_diff_check(f, params, grads, 1e-5);
  CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("finite_diff_check is tight on quadratics and exact on constants") {
  Rng rng(31);
  const DenseMatrix target = random_matrix(4, 2, rng);
  std::vector<DenseMatrix> params = {random_matrix(4, 2, rng)};

  auto quad = [&](const std::vector<DenseMatrix>& p) {
    Tape t;
    const auto w = t.param(p[0]);
    return t.scalar(t.square_mean(t.sub(w, t.input(target))));
  };
  Tape t;
  const auto w = t.param(params[0]);
  const auto loss = t.square_mean(t.sub(w, t.input(target)));
  t.backward(loss);
  const GradCheckReport quad_report = finite_diff_check(quad, params, {t.grad(w)}, 1e-5);
  CHECK(quad_report.max_rel_error < 1e-6);

  auto constant = [&](const std::vector<DenseMatrix>&) { return 2.5; };
  const GradCheckReport const_report =
      finite_diff_check(constant, params, {DenseMatrix(4, 2)}, 1e-5);
  CHECK(const_report.max_rel_error == 0.0);
  CHECK_THROWS_AS(finite_diff_check(constant, params, {DenseMatrix(4, 2)}, 0.0),
                  std::invalid_argument);
}
