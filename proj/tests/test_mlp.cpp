#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "medsensor/errors.hpp"
#include "medsensor/mlp.hpp"
#include "medsensor/rng.hpp"

using namespace medsensor;

namespace {

// Independent straight-line forward pass: plain loops, no shared code path.
double oracle_forward(const MlpModel& m, const std::vector<float>& x) {
  std::vector<double> hidden(m.arch.hidden_size, 0.0);
  for (std::size_t h = 0; h < m.arch.hidden_size; ++h) {
    double z = m.b1(static_cast<Eigen::Index>(h));
    for (std::size_t i = 0; i < m.arch.input_size; ++i)
      z += m.w1(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(i)) * x[i];
    hidden[h] = z > 0.0 ? z : 0.0;
  }
  double z2 = m.b2;
  for (std::size_t h = 0; h < m.arch.hidden_size; ++h)
    z2 += m.w2(static_cast<Eigen::Index>(h)) * hidden[h];
  return 1.0 / (1.0 + std::exp(-z2));
}

double oracle_loss(const std::vector<double>& p, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double pi = p[i];
    if (pi < 1e-12) pi = 1e-12;
    if (pi > 1.0 - 1e-12) pi = 1.0 - 1e-12;
    acc += -(y[i] * std::log(pi) + (1.0 - y[i]) * std::log(1.0 - pi));
  }
  return acc / static_cast<double>(p.size());
}

std::vector<FeatureVector> random_batch(std::size_t n, std::size_t width,
                                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureVector> out(n);
  for (auto& v : out) {
    v.label = rng.uniform() < 0.5 ? Label::Medication : Label::NonMedication;
    for (std::size_t j = 0; j < width; ++j)
      v.values.push_back(static_cast<float>(rng.normal()));
  }
  return out;
}

VectorRefs refs(const std::vector<FeatureVector>& v) {
  VectorRefs r;
  for (const auto& x : v) r.push_back(&x);
  return r;
}

double batch_loss(const MlpModel& m, const VectorRefs& data) {
  return loss(forward_batch(m, to_matrix(data, m.arch.input_size)), to_labels(data));
}

// max relative error between analytic and central finite-difference gradients
double gradient_check(MlpModel model, const VectorRefs& data, double h = 1e-5) {
  const auto X = to_matrix(data, model.arch.input_size);
  const auto y = to_labels(data);
  const Gradients g = gradient(model, X, y);

  double worst = 0.0;
  auto probe = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = loss(forward_batch(model, X), y);
    param = saved - h;
    const double down = loss(forward_batch(model, X), y);
    param = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double rel = std::abs(analytic - numeric) /
                       std::max(1.0, std::abs(analytic));
    worst = std::max(worst, rel);
  };

  for (Eigen::Index r = 0; r < model.w1.rows(); ++r)
    for (Eigen::Index c = 0; c < model.w1.cols(); ++c) probe(model.w1(r, c), g.w1(r, c));
  for (Eigen::Index i = 0; i < model.b1.size(); ++i) probe(model.b1(i), g.b1(i));
  for (Eigen::Index i = 0; i < model.w2.size(); ++i) probe(model.w2(i), g.w2(i));
  probe(model.b2, g.b2);
  return worst;
}

}  // namespace

TEST_CASE("init parameter count, determinism, zero biases") {
  const MlpArchitecture arch{4500, 90, 1};
  CHECK(arch.parameter_count() == 405181);

  const auto a = init(arch, 7);
  const auto b = init(arch, 7);
  CHECK(a.w1 == b.w1);
  CHECK(a.w2 == b.w2);

  const auto small = init({3, 2, 1}, 1);
  CHECK(small.b1(0) == 0.0);
  CHECK(small.b1(1) == 0.0);
  CHECK(small.b2 == 0.0);

  // He-uniform range over fan-in
  const double he = std::sqrt(6.0 / 4500.0);
  CHECK(a.w1.maxCoeff() <= he);
  CHECK(a.w1.minCoeff() >= -he);
}

TEST_CASE("forward analytic cases") {
  MlpModel m;
  m.arch = {3, 2, 1};
  m.w1 = Eigen::MatrixXd::Zero(2, 3);
  m.b1 = Eigen::VectorXd::Zero(2);
  m.w2 = Eigen::RowVectorXd::Zero(2);
  m.b2 = 0.0;
  const std::vector<float> x = {1.0f, -2.0f, 0.5f};
  CHECK(forward(m, x) == doctest::Approx(0.5));

  MlpModel relu_kill;
  relu_kill.arch = {1, 1, 1};
  relu_kill.w1 = Eigen::MatrixXd::Constant(1, 1, 1.0);
  relu_kill.b1 = Eigen::VectorXd::Zero(1);
  relu_kill.w2 = Eigen::RowVectorXd::Constant(1, 1.0);
  relu_kill.b2 = 0.0;
  const std::vector<float> neg = {-5.0f};
  CHECK(forward(relu_kill, neg) == doctest::Approx(0.5));

  CHECK_THROWS_AS(forward(m, std::vector<float>{1.0f}), ShapeMismatch);
}

TEST_CASE("forward matches the independent oracle to 1e-12") {
  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = init({12, 5, 1}, rng.next_u64());
    std::vector<float> x(12);
    for (auto& v : x) v = static_cast<float>(rng.normal());
    CHECK(std::abs(forward(model, x) - oracle_forward(model, x)) < 1e-12);
  }
}

TEST_CASE("loss analytic cases and oracle agreement") {
  Eigen::VectorXd p(1), y(1);
  p << 0.5;
  y << 1.0;
  CHECK(loss(p, y) == doctest::Approx(std::log(2.0)));

  p << 1.0 - 1e-12;
  CHECK(loss(p, y) == doctest::Approx(0.0).epsilon(1e-9));

  Rng rng(44);
  Eigen::VectorXd pr(64), yr(64);
  std::vector<double> pv(64), yv(64);
  for (int i = 0; i < 64; ++i) {
    pv[i] = rng.uniform(0.001, 0.999);
    yv[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    pr(i) = pv[i];
    yr(i) = yv[i];
  }
  CHECK(std::abs(loss(pr, yr) - oracle_loss(pv, yv)) < 1e-12);

  Eigen::VectorXd short_y(2);
  CHECK_THROWS_AS(loss(pr, short_y), LengthMismatch);
}

TEST_CASE("gradient matches central finite differences") {
  const auto data = random_batch(1, 2, 55);
  auto model = init({2, 2, 1}, 56);
  model.w1 *= 0.5;
  CHECK(gradient_check(model, refs(data)) < 1e-5);
}

TEST_CASE("gradient is near zero when predictions equal labels") {
  // force saturated predictions: huge output weights on a one-sided input
  std::vector<FeatureVector> data(2);
  data[0].values = {3.0f};
  data[0].label = Label::Medication;
  data[1].values = {0.0f};
  data[1].label = Label::NonMedication;

  MlpModel m;
  m.arch = {1, 1, 1};
  m.w1 = Eigen::MatrixXd::Constant(1, 1, 40.0);
  m.b1 = Eigen::VectorXd::Zero(1);
  m.w2 = Eigen::RowVectorXd::Constant(1, 1.0);
  m.b2 = -55.0;  // x=3 -> z2=65 -> p~1; x=0 -> z2=-55 -> p~0

  const auto d = refs(data);
  const auto X = to_matrix(d, 1);
  const auto y = to_labels(d);
  const auto probs = forward_batch(m, X);
  REQUIRE(probs(0) > 0.999);
  REQUIRE(probs(1) < 0.001);
  const auto g = gradient(m, X, y);
  const double norm = g.w1.norm() + g.b1.norm() + g.w2.norm() + std::abs(g.b2);
  CHECK(norm < 1e-6);
}

TEST_CASE("duplicating every batch element leaves the gradient unchanged") {
  auto data = random_batch(6, 4, 77);
  auto doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());

  const auto model = init({4, 3, 1}, 78);
  const auto g1 = gradient(model, to_matrix(refs(data), 4), to_labels(refs(data)));
  const auto g2 =
      gradient(model, to_matrix(refs(doubled), 4), to_labels(refs(doubled)));
  CHECK((g1.w1 - g2.w1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g1.b1 - g2.b1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g1.w2 - g2.w2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(g1.b2 - g2.b2) < 1e-12);
}

TEST_CASE("train with zero learning rate leaves the model bitwise unchanged") {
  const auto data = random_batch(10, 4, 88);
  const auto before = init({4, 3, 1}, 89);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 1;
  cfg.seed = 90;
  const auto result = train(before, refs(data), cfg);
  CHECK(result.model.w1 == before.w1);
  CHECK(result.model.b1 == before.b1);
  CHECK(result.model.w2 == before.w2);
  CHECK(result.model.b2 == before.b2);
  CHECK(result.history.size() == 1);
}

TEST_CASE("training separates a linearly separable toy set") {
  // 20 points in 2-D, separable by x0 + x1 > 0 with margin 0.5
  std::vector<FeatureVector> data;
  Rng rng(99);
  while (data.size() < 20) {
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    const double m = a + b;
    if (std::abs(m) < 0.5) continue;
    FeatureVector v;
    v.values = {static_cast<float>(a), static_cast<float>(b)};
    v.label = m > 0 ? Label::Medication : Label::NonMedication;
    data.push_back(std::move(v));
  }
  // brute-force confirmation that a separating direction exists
  bool separable = false;
  for (int deg = 0; deg < 360 && !separable; ++deg) {
    const double wx = std::cos(deg * 3.14159 / 180.0);
    const double wy = std::sin(deg * 3.14159 / 180.0);
    bool ok = true;
    for (const auto& v : data) {
      const double s = wx * v.values[0] + wy * v.values[1];
      if ((s > 0) != (v.label == Label::Medication)) ok = false;
    }
    separable = ok;
  }
  REQUIRE(separable);

  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.01;
  cfg.seed = 100;
  const auto result = train(init({2, 4, 1}, 100), refs(data), cfg);
  CHECK(result.history.back().train_accuracy == 1.0);
}

TEST_CASE("training is deterministic under the seed") {
  const auto data = random_batch(30, 6, 111);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 112;
  const auto a = train(init({6, 4, 1}, 112), refs(data), cfg);
  const auto b = train(init({6, 4, 1}, 112), refs(data), cfg);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].loss == b.history[i].loss);
    CHECK(a.history[i].train_accuracy == b.history[i].train_accuracy);
  }
  CHECK(a.model.w1 == b.model.w1);
}

TEST_CASE("predict boundary rules") {
  MlpModel m;
  m.arch = {2, 2, 1};
  m.w1 = Eigen::MatrixXd::Zero(2, 2);
  m.b1 = Eigen::VectorXd::Zero(2);
  m.w2 = Eigen::RowVectorXd::Zero(2);
  m.b2 = 0.0;
  const std::vector<float> x = {1.0f, 2.0f};
  CHECK(predict(m, x) == 1);        // 0.5 >= 0.5
  CHECK(predict(m, x, 1.0) == 0);   // sigmoid < 1 strictly
}

TEST_CASE("save/load round-trips forward bitwise") {
  const auto model = init({8, 5, 1}, 123);
  const auto path =
      (std::filesystem::temp_directory_path() / "medsensor_model_test.bin").string();
  save_model(path, model);
  const auto loaded = load_model(path);
  CHECK(loaded.arch.input_size == 8);
  CHECK(loaded.arch.hidden_size == 5);

  Rng rng(124);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<float> x(8);
    for (auto& v : x) v = static_cast<float>(rng.normal());
    CHECK(forward(model, x) == forward(loaded, x));
  }
  std::filesystem::remove(path);
}

TEST_CASE("gradient check over 100 random seeds at arch(12,5,1)") {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto model = init({12, 5, 1}, derive_seed(1000, seed));
    const auto data = random_batch(8, 12, derive_seed(2000, seed));
    worst = std::max(worst, gradient_check(model, refs(data)));
  }
  CHECK(worst < 1e-5);
}
