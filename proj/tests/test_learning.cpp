// Copyright 2026 The seqplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "seqplan/datasets.hpp"
#include "seqplan/experiments.hpp"
#include "seqplan/io/json_io.hpp"
#include "seqplan/learning/train.hpp"
#include "support.hpp"

namespace seqplan {
namespace {

const std::filesystem::path kSource = SEQPLAN_SOURCE_DIR;

MlpModel demo_sphere_model() {
  return load_model(kSource / "demos" / "models" / "sphere_model.json");
}

PointSet sphere_points(int count, std::uint64_t seed = 0) {
  return generate({DatasetKind::kSphere, count, 0.0, seed});
}

double angle_deg(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = std::abs(a.normalized().dot(b.normalized()));
  return std::acos(std::min(1.0, c)) * 180.0 / std::numbers::pi;
}

// ------------------------------------------------------------ local PCA

TEST(LocalPca, CoplanarPointsGiveAxisNormal) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointSet data(50, 3);
  for (int i = 0; i < 50; ++i) data.row(i) << u(rng), u(rng), 0.0;
  const LocalChart c = local_pca(data, 0, 10, 1);
  ASSERT_EQ(c.normal.cols(), 1);
  EXPECT_NEAR(std::abs(c.normal(2, 0)), 1.0, 1e-12);
  EXPECT_LE(c.eigenvalues[2], 1e-12);
  EXPECT_EQ(c.estimated_l, 1);
}

TEST(LocalPca, SphereNormalIsRadial) {
  const PointSet data = sphere_points(2000);
  const KdTree tree(data);
  const int i = tree.nearest(Eigen::Vector3d(1.0, 0.0, 0.0));
  const LocalChart c = local_pca(data, tree, i, 20);
  ASSERT_EQ(c.normal.cols(), 1);
  EXPECT_LE(angle_deg(c.normal.col(0), data.row(i).transpose()), 5.0);
}

TEST(LocalPca, TooFewNeighboursThrows) {
  const PointSet data = sphere_points(50);
  EXPECT_THROW(local_pca(data, 0, 2), PreconditionError);
}

TEST(LocalPca, BasesAreOrthonormal) {
  const PointSet data = sphere_points(300);
  const ChartSet charts = build_charts(data, KdTree(data), 10);
  for (const LocalChart& c : charts.charts) {
    Matrix v(3, 3);
    v << c.tangent, c.normal;
    EXPECT_LE((v.transpose() * v - Matrix::Identity(3, 3)).norm(), 1e-8);
  }
}

TEST(Eigengap, SecondGapMeansOneConstraint) {
  EXPECT_EQ(estimate_intrinsic_dim(make_config({1.0, 0.9, 0.001})), 1);
}

TEST(Eigengap, FirstGapMeansTwoConstraints) {
  EXPECT_EQ(estimate_intrinsic_dim(make_config({1.0, 0.01, 0.009})), 2);
}

TEST(Eigengap, FlatSpectrumGivesZero) {
  EXPECT_EQ(estimate_intrinsic_dim(make_config({1.0, 1.0, 1.0})), 0);
}

TEST(Eigengap, CircleDatasetHasTwoConstraints) {
  const PointSet data = generate({DatasetKind::kCircle3d, 1000, 0.0, 0});
  const ChartSet charts = build_charts(data, KdTree(data), default_neighbor_count(3));
  EXPECT_EQ(charts.l, 2);
}

// ------------------------------------------------------------------ OSA

Matrix random_basis(std::mt19937_64& rng, int n, int l) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::HouseholderQR<Matrix> qr(Matrix::NullaryExpr(n, n, [&] { return g(rng); }));
  return Matrix(qr.householderQ()).leftCols(l);
}

Matrix planar_rotation(double deg) {
  const double a = deg * std::numbers::pi / 180.0;
  Matrix r(2, 2);
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

TEST(OsaLocal, IdenticalBasesGiveIdentity) {
  std::mt19937_64 rng(1);
  const Matrix va = random_basis(rng, 3, 2);
  const LocalAlignment a = osa_local_align(va, va, rng);
  EXPECT_LE((a.rotation - Matrix::Identity(2, 2)).norm(), 1e-5);
  EXPECT_LE(a.loss, 1e-10);
}

TEST(OsaLocal, RecoversPlanarRotation) {
  std::mt19937_64 rng(2);
  const Matrix va = random_basis(rng, 3, 2);
  const Matrix r0 = planar_rotation(37.0);
  const LocalAlignment a = osa_local_align(va, va * r0, rng);
  EXPECT_LE((a.rotation - r0).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_LE(a.loss, 1e-8);
  EXPECT_NEAR(a.rotation.determinant(), 1.0, 1e-6);
}

TEST(OsaLocal, FlippedBasisNeedsTheFlippedPair) {
  std::mt19937_64 rng(3);
  const Matrix va = random_basis(rng, 4, 2);
  const Matrix vc = flip_first(va);
  const LocalAlignment direct = osa_local_align(va, vc, rng);
  EXPECT_GE(direct.loss, 2.0 - 1e-6);
  const LocalAlignment flipped = osa_local_align(va, flip_first(vc), rng);
  EXPECT_LE(flipped.loss, 1e-8);
}

TEST(OsaAlign, AlignedInputIsLeftAlone) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointSet data(60, 3);
  for (int i = 0; i < 60; ++i) data.row(i) << u(rng), u(rng), 0.0;
  std::vector<Matrix> normals(60, Matrix(Eigen::Vector3d(0.0, 0.0, 1.0)));
  const OsaResult r = osa_align(data, KdTree(data), normals, 6);
  for (int i = 0; i < 60; ++i) {
    EXPECT_FALSE(r.graph.flipped[static_cast<size_t>(i)]);
    EXPECT_NEAR(r.graph.compound[static_cast<size_t>(i)](0, 0), 1.0, 1e-6);
  }
  EXPECT_EQ(r.graph.dag_edges.size(), 59u);
}

TEST(OsaAlign, RandomSignFlipsAreUndone) {
  const PointSet data = sphere_points(2000, 7);
  const KdTree tree(data);
  const OsaResult r = osa_align(data, tree, testing::scrambled_normals(data, 1, 5), 10);
  for (const auto& [p, c] : r.graph.dag_edges) {
    EXPECT_LE(aligned_edge_loss(r.aligned[static_cast<size_t>(p)],
                                r.aligned[static_cast<size_t>(c)]),
              1e-3);
  }
  const double root_sign = r.aligned[0].col(0).dot(data.row(0).transpose());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double s = r.aligned[static_cast<size_t>(i)].col(0).dot(data.row(i).transpose());
    EXPECT_GT(s * root_sign, 0.0) << "point " << i;
  }
}

TEST(OsaAlign, EstimatedChartsEndUpConsistent) {
  const PointSet data = sphere_points(2000, 7);
  const KdTree tree(data);
  const ChartSet charts = build_charts(data, tree, 20);
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.5);
  std::vector<Matrix> normals;
  for (const LocalChart& c : charts.charts) {
    normals.push_back(coin(rng) ? Matrix(-c.normal) : c.normal);
  }
  const OsaResult r = osa_align(data, tree, normals, 10);
  const double root_sign = r.aligned[0].col(0).dot(data.row(0).transpose());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double s = r.aligned[static_cast<size_t>(i)].col(0).dot(data.row(i).transpose());
    EXPECT_GT(s * root_sign, 0.0) << "point " << i;
  }
}

TEST(OsaAlign, RotatedCircleBasesAlignAndStayAligned) {
  const PointSet data = generate({DatasetKind::kCircle3d, 1000, 0.0, 3});
  const KdTree tree(data);
  const OsaResult r = osa_align(data, tree, testing::scrambled_normals(data, 2, 8), 10);
  for (const auto& [p, c] : r.graph.dag_edges) {
    EXPECT_LE(aligned_edge_loss(r.aligned[static_cast<size_t>(p)],
                                r.aligned[static_cast<size_t>(c)]),
              1e-3);
  }
  for (const Matrix& g : r.graph.compound) {
    EXPECT_LE((g.transpose() * g - Matrix::Identity(2, 2)).norm(), 1e-6);
    EXPECT_NEAR(g.determinant(), 1.0, 1e-6);
  }
  for (const Matrix& a : r.aligned) {
    EXPECT_LE((a.transpose() * a - Matrix::Identity(2, 2)).norm(), 1e-8);
  }
  const OsaResult again = osa_align(data, tree, r.aligned, 10);
  for (size_t i = 0; i < again.graph.flipped.size(); ++i) {
    EXPECT_FALSE(again.graph.flipped[i]) << "point " << i;
  }
  for (const auto& [p, c] : again.graph.dag_edges) {
    EXPECT_LE(aligned_edge_loss(again.aligned[static_cast<size_t>(p)],
                                again.aligned[static_cast<size_t>(c)]),
              1e-3);
  }
}

TEST(OsaAlign, DisconnectedGraphThrows) {
  PointSet data(6, 3);
  data << 0, 0, 0, 0.1, 0, 0, 0.2, 0, 0, 5, 0, 0, 5.1, 0, 0, 5.2, 0, 0;
  std::vector<Matrix> normals(6, Matrix(Eigen::Vector3d(0.0, 0.0, 1.0)));
  try {
    osa_align(data, KdTree(data), normals, 1);
    FAIL() << "expected a reachability error";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("reaches only"), std::string::npos);
  }
}

// --------------------------------------------------------- augmentation

struct AxisPoints {
  PointSet data{6, 3};
  std::vector<Matrix> normals;
  AxisPoints() {
    data << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
    for (int i = 0; i < 6; ++i) normals.push_back(Matrix(data.row(i).transpose()));
  }
};

TEST(Augment, LevelsFollowTheRay) {
  const AxisPoints ax;
  const KdTree tree(ax.data);
  AugmentSettings s;
  s.levels = 1;
  s.epsilon = 0.1;
  std::mt19937_64 rng(1);
  for (const AugmentedSample& a : augment(ax.data, tree, ax.normals, s, rng)) {
    if (a.base != 0) continue;
    const double sign = a.u[0];
    EXPECT_NEAR(std::abs(sign), 1.0, 1e-15);
    EXPECT_LE((a.point - Eigen::Vector3d(1.0 + 0.1 * sign, 0.0, 0.0)).norm(), 1e-15);
    EXPECT_DOUBLE_EQ(a.label, 0.1);
  }
}

TEST(Augment, RejectsPointsCloserToAnotherBase) {
  const AxisPoints ax;
  const KdTree tree(ax.data);
  EXPECT_EQ(tree.nearest(Eigen::Vector3d(-0.5, 0.0, 0.0)), 1);
  AugmentSettings s;
  s.levels = 1;
  s.epsilon = 1.5;
  s.reflection = false;
  s.fractions.clear();
  int inward = 0;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    std::mt19937_64 rng(seed);
    Eigen::VectorXd w(1);
    std::normal_distribution<double> g(0.0, 1.0);
    w[0] = g(rng);  // the weight augment() draws first for base 0
    const bool toward_center = normal_direction(ax.normals[0], w)[0] < 0.0;
    std::mt19937_64 run(seed);
    const auto samples = augment(ax.data, tree, ax.normals, s, run);
    const bool kept = std::any_of(samples.begin(), samples.end(),
                                  [](const AugmentedSample& a) { return a.base == 0; });
    if (toward_center) {
      ++inward;
      EXPECT_FALSE(kept);
    } else {
      EXPECT_TRUE(kept);
    }
  }
  EXPECT_GT(inward, 0);
}

TEST(Augment, HalfOfLevelTwoIsLevelOne) {
  const AxisPoints ax;
  const KdTree tree(ax.data);
  AugmentSettings s;
  s.levels = 2;
  s.epsilon = 0.1;
  std::mt19937_64 rng(9);
  const auto samples = augment(ax.data, tree, ax.normals, s, rng);
  int checked = 0;
  for (const AugmentedSample& two : samples) {
    if (two.level != 2) continue;
    for (const AugmentedSample& one : samples) {
      if (one.base != two.base || one.level != 1) continue;
      ASSERT_EQ(two.fractions.size(), 1u);
      EXPECT_EQ(two.fractions[0].first, 0.5);
      EXPECT_LE((two.fractions[0].second - one.point).norm(), 1e-15);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 6);
}

TEST(EpsilonAug, MeanTangentEigenvalue) {
  LocalChart c;
  c.eigenvalues = make_config({4.0, 4.0, 0.0});
  c.tangent = Matrix::Identity(3, 2);
  c.normal = Matrix::Identity(3, 3).rightCols(1);
  EXPECT_DOUBLE_EQ(default_epsilon_aug({c, c}), 2.0);
  c.eigenvalues = make_config({1.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(default_epsilon_aug({c}), 1.0);
}

TEST(EpsilonAug, ScalesWithTheData) {
  const PointSet data = sphere_points(2000);
  const double e1 = default_epsilon_aug(build_charts(data, KdTree(data), 20).charts);
  const PointSet scaled = 3.0 * data;
  const double e3 = default_epsilon_aug(build_charts(scaled, KdTree(scaled), 20).charts);
  EXPECT_GT(e1, 0.0);
  EXPECT_NEAR(e3 / e1, 3.0, 1e-9);
}

// ------------------------------------------------------------------ MLP

TEST(Mlp, ZeroWeightsOutputTheBias) {
  MlpModel m = make_mlp({3, 6, 4, 2}, 1);
  for (Matrix& w : m.weights) w.setZero();
  m.biases.back() = Eigen::Vector2d(0.3, -1.2);
  for (const Config& q : {make_config({0, 0, 0}), make_config({4, -2, 7})}) {
    EXPECT_EQ(mlp_forward(m, q), m.biases.back());
  }
}

// With a tanh hidden unit the closed form carries the derivative of tanh.
TEST(Mlp, OneOneOneJacobianClosedForm) {
  MlpModel m = make_mlp({1, 1, 1}, 2);
  const double w1 = 0.7, b1 = -0.2, w2 = 1.9;
  m.weights[0](0, 0) = w1;
  m.biases[0][0] = b1;
  m.weights[1](0, 0) = w2;
  m.biases[1][0] = 0.4;
  for (double q : {-1.0, 0.0, 0.35, 2.0}) {
    const double t = std::tanh(w1 * q + b1);
    EXPECT_NEAR(mlp_jacobian(m, make_config({q}))(0, 0), w2 * (1.0 - t * t) * w1, 1e-15);
    EXPECT_NEAR(mlp_forward(m, make_config({q}))[0], w2 * t + 0.4, 1e-15);
  }
}

TEST(Mlp, TrainedJacobianMatchesFiniteDifferences) {
  const MlpModel m = demo_sphere_model();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const double step = 1e-6;
  for (int k = 0; k < 100; ++k) {
    const Config q = Eigen::Vector3d(u(rng), u(rng), u(rng));
    const Matrix jac = mlp_jacobian(m, q);
    for (int d = 0; d < 3; ++d) {
      Config a = q, b = q;
      a[d] += step;
      b[d] -= step;
      const double fd = (mlp_forward(m, a)[0] - mlp_forward(m, b)[0]) / (2.0 * step);
      EXPECT_LE(std::abs(jac(0, d) - fd), 1e-4 * std::abs(fd) + 1e-8);
    }
  }
}

TEST(Mlp, FlattenRoundTrip) {
  MlpModel m = make_mlp({3, 5, 2}, 3);
  const Eigen::VectorXd p = m.flatten();
  MlpModel n = make_mlp({3, 5, 2}, 4);
  n.unflatten(p);
  EXPECT_EQ(n.flatten(), p);
  EXPECT_EQ(n.weights[0], m.weights[0]);
}

// --------------------------------------------------------------- losses

TEST(Losses, ExactLabelsGiveZeroNormAndReflection) {
  // h(q) = w2 tanh(2 x) is odd across the plane x = 0.
  MlpModel m = make_mlp({3, 1, 1}, 5);
  m.weights[0] << 2.0, 0.0, 0.0;
  m.biases[0].setZero();
  m.weights[1](0, 0) = 0.8;
  m.biases[1].setZero();
  LossBatch b;
  for (double t : {0.1, 0.25, 0.5}) {
    const int plus = b.add(make_config({t, 0.3, -0.2}));
    const int minus = b.add(make_config({-t, 0.3, -0.2}));
    const double label = std::abs(0.8 * std::tanh(2.0 * t));
    b.norm_terms.emplace_back(plus, label);
    b.norm_terms.emplace_back(minus, label);
    b.reflection_pairs.emplace_back(plus, minus);
  }
  const LossValues v = compute_losses(m, b, {});
  EXPECT_LE(v.norm, 1e-20);
  EXPECT_EQ(v.reflection, 0.0);
}

TEST(Losses, IdenticalSimilarPairIsZero) {
  const MlpModel m = make_mlp({3, 4, 1}, 6);
  LossBatch b;
  const int a = b.add(make_config({0.2, 0.4, 0.9}));
  const int c = b.add(make_config({0.2, 0.4, 0.9}));
  b.similar_pairs.emplace_back(a, c);
  EXPECT_EQ(compute_losses(m, b, {}).similar, 0.0);
}

TEST(Losses, EmptyBatchThrows) {
  const MlpModel m = make_mlp({3, 4, 1}, 6);
  EXPECT_THROW(compute_losses(m, LossBatch{}, {}), PreconditionError);
}

TEST(Losses, GradientsMatchFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const testing::LossCase c = testing::random_loss_case(seed, 1 + static_cast<int>(seed % 2));
    for (int term = 0; term < 6; ++term) {
      EXPECT_LE(testing::loss_gradient_error(c, term), 1.0)
          << testing::kLossTermNames[static_cast<size_t>(term)] << " seed " << seed;
    }
  }
}

TEST(Losses, SubspaceAlignmentMatchesMonitoredError) {
  const testing::LossCase c = testing::random_loss_case(3, 1);
  LossWeights w{0.0, 0.0, 0.0, 0.0, 1.0};
  w.align_form = AlignForm::kSubspace;
  LossBatch one;
  one.add(c.batch.points[0]);
  one.align_terms.push_back(c.batch.align_terms[0]);
  one.align_terms[0].column = 0;
  const double loss = compute_losses(c.model, one, w).align;
  const double svd = svd_projection_error(mlp_jacobian(c.model, c.batch.points[0]),
                                          c.batch.align_terms[0].normal);
  EXPECT_NEAR(loss, svd, 1e-8);
}

// ------------------------------------------------------------- training

TEST(Training, OverfitsTenPoints) {
  const PointSet data = sphere_points(10);
  TrainSettings s;
  s.epochs = 2000;
  s.neighbors = 5;
  s.l_override = 1;
  s.epsilon_aug = 0.3;
  s.learning_rate = 1e-2;
  const TrainResult r = train_ecomann(data, s);
  ASSERT_EQ(r.history.epochs.size(), 2001u);
  double best = r.history.epochs.front().total;
  for (const LossValues& v : r.history.epochs) best = std::min(best, v.total);
  EXPECT_LE(best, 1e-3);
}

TEST(Training, HistoryHasInitialRow) {
  TrainSettings s;
  s.epochs = 3;
  const TrainResult r = train_ecomann(sphere_points(200), s);
  EXPECT_EQ(r.history.epochs.size(), 4u);
  EXPECT_EQ(r.history.projection_error.size(), 4u);
  EXPECT_EQ(r.history.learning_rate.size(), 4u);
  EXPECT_EQ(r.l, 1);
  EXPECT_EQ(r.model.widths, (std::vector<int>{3, 36, 24, 18, 10, 1}));
}

TEST(Training, RejectsNonFiniteData) {
  PointSet data = sphere_points(50);
  data(3, 1) = std::nan("");
  EXPECT_THROW(train_ecomann(data, TrainSettings{}), PreconditionError);
}

TEST(Training, DivergenceIsReported) {
  TrainSettings s;
  s.epochs = 2;
  s.divergence_threshold = 1e-12;
  EXPECT_THROW(train_ecomann(sphere_points(100), s), TrainingDivergence);
}

TEST(Training, SphereProjectsWell) {
  const PointSet data = sphere_points(2000);
  const TrainResult r = train_ecomann(data, TrainSettings{});
  const EvalReport e = evaluate_model(r.model, DatasetKind::kSphere, data);
  EXPECT_GE(e.P, 90.0);
  EXPECT_LE(e.mu_test.mean, 0.05);
}

TEST(Training, WithoutAugmentationProjectsPoorly) {
  const PointSet data = sphere_points(2000);
  TrainSettings s;
  s.use_augmentation = false;
  const TrainResult r = train_ecomann(data, s);
  EXPECT_LE(evaluate_model(r.model, DatasetKind::kSphere, data).P, 30.0);
}

// ------------------------------------------------------ learned manifold

TEST(LearnedProjection, OnManifoldPointIsUnchanged) {
  const MlpModel m = demo_sphere_model();
  const ProjectionResult first = project_learned(m, make_config({2, 0, 0}));
  ASSERT_TRUE(first.ok());
  const ProjectionResult again = project_learned(m, first.q);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(again.iterations, 0);
  EXPECT_EQ(again.q, first.q);
}

TEST(LearnedProjection, LandsNearTheSphere) {
  const ProjectionResult r = project_learned(demo_sphere_model(), make_config({2, 0, 0}));
  ASSERT_TRUE(r.ok());
  EXPECT_LE(std::abs(r.q.norm() - 1.0), 0.1);
}

TEST(LearnedProjection, ZeroJacobianFails) {
  MlpModel m = make_mlp({3, 4, 1}, 8);
  for (Matrix& w : m.weights) w.setZero();
  m.biases.back()[0] = 0.5;
  const ProjectionResult r = project_learned(m, make_config({0.1, 0.2, 0.3}));
  EXPECT_FALSE(r.ok());
}

TEST(LearnedManifold, DelegatesToTheNetwork) {
  const MlpModel m = demo_sphere_model();
  const Manifold lm = learned_manifold(m);
  EXPECT_EQ(lm.ambient_dim(), 3);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    const Config q = Eigen::Vector3d(u(rng), u(rng), u(rng));
    EXPECT_EQ(evaluate(lm, q), mlp_forward(m, q));
  }
}

TEST(LearnedManifold, CoreProjectionAgreesWithLearnedProjection) {
  const MlpModel m = demo_sphere_model();
  const Manifold lm = learned_manifold(m);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 20; ++k) {
    const Config q = Eigen::Vector3d(u(rng), u(rng), u(rng));
    if (q.norm() < 0.3) continue;
    const ProjectionResult a = project_learned(m, q);
    const ProjectionResult b = project_detailed(q, lm);
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_LE(std::abs(a.q.norm() - 1.0), 0.1);
    EXPECT_LE(std::abs(b.q.norm() - 1.0), 0.1);
  }
}

TEST(LearnedManifold, PlansThroughTheLearnedSphere) {
  const TaskFile tf = load_task(kSource / "demos" / "tasks" / "learned_sphere.json");
  PlannerParams p = planner_params_from_json(tf.planner);
  p.rng_seed = 0;
  const PathResult r = psm_star(tf.task, p);
  ASSERT_TRUE(r.success);
  const Manifold& learned = tf.task.manifolds[1];
  for (int i = r.segment_starts[1]; i <= r.segment_starts[2]; ++i) {
    const Config& q = r.waypoints[static_cast<size_t>(i)];
    EXPECT_LE(evaluate(learned, q).norm(), p.epsilon) << "waypoint " << i;
  }
}

}  // namespace
}  // namespace seqplan
