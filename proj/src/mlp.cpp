#include "medsensor/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "medsensor/errors.hpp"
#include "medsensor/rng.hpp"

namespace medsensor {

namespace {

constexpr double kEps = 1e-12;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

MlpModel init(const MlpArchitecture& arch, std::uint64_t seed) {
  Rng rng(seed);
  MlpModel m;
  m.arch = arch;
  const auto h = static_cast<Eigen::Index>(arch.hidden_size);
  const auto in = static_cast<Eigen::Index>(arch.input_size);

  const double he = std::sqrt(6.0 / static_cast<double>(arch.input_size));
  m.w1.resize(h, in);
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < in; ++c) m.w1(r, c) = rng.uniform(-he, he);
  m.b1 = Eigen::VectorXd::Zero(h);

  const double xavier = std::sqrt(6.0 / static_cast<double>(arch.hidden_size + 1));
  m.w2.resize(h);
  for (Eigen::Index c = 0; c < h; ++c) m.w2(c) = rng.uniform(-xavier, xavier);
  m.b2 = 0.0;
  return m;
}

double forward(const MlpModel& model, std::span<const float> values) {
  if (values.size() != model.arch.input_size)
    throw ShapeMismatch("forward: expected " + std::to_string(model.arch.input_size) +
                        " inputs, got " + std::to_string(values.size()));
  Eigen::VectorXd x(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    x(static_cast<Eigen::Index>(i)) = values[i];
  const Eigen::VectorXd a1 = ((model.w1 * x) + model.b1).cwiseMax(0.0);
  return sigmoid(model.w2.dot(a1) + model.b2);
}

Eigen::VectorXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& X) {
  if (static_cast<std::size_t>(X.cols()) != model.arch.input_size)
    throw ShapeMismatch("forward_batch: input width mismatch");
  const Eigen::MatrixXd a1 =
      ((X * model.w1.transpose()).rowwise() + model.b1.transpose()).cwiseMax(0.0);
  Eigen::VectorXd z2 = (a1 * model.w2.transpose()).array() + model.b2;
  return z2.unaryExpr([](double z) { return sigmoid(z); });
}

double loss(const Eigen::VectorXd& probabilities, const Eigen::VectorXd& labels) {
  if (probabilities.size() != labels.size())
    throw LengthMismatch("loss: probabilities and labels differ in length");
  if (probabilities.size() == 0) throw EmptyInput("loss: empty batch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    const double p = std::clamp(probabilities(i), kEps, 1.0 - kEps);
    const double y = labels(i);
    acc += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  return acc / static_cast<double>(probabilities.size());
}

Gradients gradient(const MlpModel& model, const Eigen::MatrixXd& X,
                   const Eigen::VectorXd& y) {
  if (X.rows() == 0) throw EmptyInput("gradient: empty batch");
  if (static_cast<std::size_t>(X.cols()) != model.arch.input_size)
    throw ShapeMismatch("gradient: input width mismatch");
  if (X.rows() != y.size()) throw LengthMismatch("gradient: batch/label mismatch");

  const double n = static_cast<double>(X.rows());
  const Eigen::MatrixXd z1 =
      (X * model.w1.transpose()).rowwise() + model.b1.transpose();
  const Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
  Eigen::VectorXd p = (a1 * model.w2.transpose()).array() + model.b2;
  p = p.unaryExpr([](double z) { return sigmoid(z); });

  // composite sigmoid + cross-entropy: dL/dz2 = (p - y) / n
  const Eigen::VectorXd dz2 = (p - y) / n;

  Gradients g;
  g.w2 = dz2.transpose() * a1;
  g.b2 = dz2.sum();
  Eigen::MatrixXd da1 = dz2 * model.w2;                 // n x hidden
  // ReLU subgradient at 0 is 0
  Eigen::MatrixXd dz1 = (z1.array() > 0.0).select(da1, 0.0);
  g.w1 = dz1.transpose() * X;
  g.b1 = dz1.colwise().sum().transpose();
  return g;
}

namespace {

struct AdamState {
  Eigen::MatrixXd mw1, vw1;
  Eigen::VectorXd mb1, vb1;
  Eigen::RowVectorXd mw2, vw2;
  double mb2 = 0.0, vb2 = 0.0;
  std::size_t t = 0;

  explicit AdamState(const MlpModel& m)
      : mw1(Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols())),
        vw1(Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols())),
        mb1(Eigen::VectorXd::Zero(m.b1.size())),
        vb1(Eigen::VectorXd::Zero(m.b1.size())),
        mw2(Eigen::RowVectorXd::Zero(m.w2.size())),
        vw2(Eigen::RowVectorXd::Zero(m.w2.size())) {}

  template <typename P, typename G>
  void step_param(P& param, G& m, G& v, const G& grad, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    m = b1 * m + (1.0 - b1) * grad;
    v = (b2 * v).eval();
    v.array() += (1.0 - b2) * grad.array().square();
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  }

  void step_scalar(double& param, double& m, double& v, double grad, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad * grad;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    param -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
  }

  void apply(MlpModel& model, const Gradients& g, double lr) {
    ++t;
    step_param(model.w1, mw1, vw1, g.w1, lr);
    step_param(model.b1, mb1, vb1, g.b1, lr);
    step_param(model.w2, mw2, vw2, g.w2, lr);
    step_scalar(model.b2, mb2, vb2, g.b2, lr);
  }
};

}  // namespace

Eigen::MatrixXd to_matrix(const VectorRefs& data, std::size_t input_size) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(data.size()),
                    static_cast<Eigen::Index>(input_size));
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i]->values.size() != input_size)
      throw ShapeMismatch("dataset vector width mismatch");
    for (std::size_t j = 0; j < input_size; ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          data[i]->values[j];
  }
  return X;
}

Eigen::VectorXd to_labels(const VectorRefs& data) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i)
    y(static_cast<Eigen::Index>(i)) = data[i]->label == Label::Medication ? 1.0 : 0.0;
  return y;
}

TrainResult train(MlpModel model, const VectorRefs& data, const TrainConfig& config) {
  if (data.empty()) throw EmptyInput("train: empty training set");

  const Eigen::MatrixXd X = to_matrix(data, model.arch.input_size);
  const Eigen::VectorXd y = to_labels(data);
  const std::size_t n = data.size();

  Rng rng(config.seed);
  AdamState adam(model);

  TrainResult result;
  MlpModel best = model;
  double best_loss = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) rng.shuffle(order);

    double epoch_loss = 0.0;
    bool bad = false;
    for (std::size_t off = 0; off < n; off += config.batch_size) {
      const std::size_t bs = std::min(config.batch_size, n - off);
      Eigen::MatrixXd bx(static_cast<Eigen::Index>(bs), X.cols());
      Eigen::VectorXd by(static_cast<Eigen::Index>(bs));
      for (std::size_t i = 0; i < bs; ++i) {
        bx.row(static_cast<Eigen::Index>(i)) =
            X.row(static_cast<Eigen::Index>(order[off + i]));
        by(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(order[off + i]));
      }

      const Eigen::VectorXd probs = forward_batch(model, bx);
      const double batch_loss = loss(probs, by);
      if (!std::isfinite(batch_loss)) {
        bad = true;
        break;
      }
      epoch_loss += batch_loss * static_cast<double>(bs);

      const Gradients g = gradient(model, bx, by);
      if (config.optimizer == Optimizer::Adam) {
        adam.apply(model, g, config.learning_rate);
      } else {
        model.w1 -= config.learning_rate * g.w1;
        model.b1 -= config.learning_rate * g.b1;
        model.w2 -= config.learning_rate * g.w2;
        model.b2 -= config.learning_rate * g.b2;
      }
    }

    if (bad || !model.w1.allFinite() || !model.b1.allFinite() ||
        !model.w2.allFinite() || !std::isfinite(model.b2)) {
      result.aborted = true;
      result.abort_epoch = epoch;
      result.model = best_loss < std::numeric_limits<double>::infinity()
                         ? std::move(best)
                         : std::move(model);
      return result;
    }

    EpochStats stats;
    stats.loss = epoch_loss / static_cast<double>(n);
    const Eigen::VectorXd probs = forward_batch(model, X);
    std::size_t correct = 0;
    for (Eigen::Index i = 0; i < probs.size(); ++i)
      if ((probs(i) >= 0.5 ? 1.0 : 0.0) == y(i)) ++correct;
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    result.history.push_back(stats);

    if (stats.loss < best_loss) {
      best_loss = stats.loss;
      best = model;
    }
  }

  result.model = std::move(model);
  return result;
}

int predict(const MlpModel& model, std::span<const float> values, double threshold) {
  return forward(model, values) >= threshold ? 1 : 0;
}

namespace {

constexpr char kModelMagic[4] = {'M', 'S', 'N', 'N'};
constexpr std::uint32_t kModelVersion = 1;

void put32(std::ofstream& f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  f.write(reinterpret_cast<char*>(b), 4);
}
std::uint32_t get32(std::ifstream& f) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_doubles(std::ofstream& f, const double* p, std::size_t n) {
  f.write(reinterpret_cast<const char*>(p),
          static_cast<std::streamsize>(n * sizeof(double)));
}
void get_doubles(std::ifstream& f, double* p, std::size_t n) {
  f.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

void save_model(const std::string& path, const MlpModel& model) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure(path);
  f.write(kModelMagic, 4);
  put32(f, kModelVersion);
  put32(f, static_cast<std::uint32_t>(model.arch.input_size));
  put32(f, static_cast<std::uint32_t>(model.arch.hidden_size));
  put32(f, static_cast<std::uint32_t>(model.arch.output_size));
  // W1 row-major
  for (Eigen::Index r = 0; r < model.w1.rows(); ++r)
    put_doubles(f, model.w1.row(r).eval().data(), static_cast<std::size_t>(model.w1.cols()));
  put_doubles(f, model.b1.data(), static_cast<std::size_t>(model.b1.size()));
  put_doubles(f, model.w2.data(), static_cast<std::size_t>(model.w2.size()));
  put_doubles(f, &model.b2, 1);
  if (!f) throw IoFailure(path);
}

MlpModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure(path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kModelMagic, 4) != 0)
    throw Error("model file: bad magic in " + path);
  if (get32(f) != kModelVersion) throw Error("model file: unsupported version");

  MlpModel m;
  m.arch.input_size = get32(f);
  m.arch.hidden_size = get32(f);
  m.arch.output_size = get32(f);
  const auto h = static_cast<Eigen::Index>(m.arch.hidden_size);
  const auto in = static_cast<Eigen::Index>(m.arch.input_size);
  m.w1.resize(h, in);
  for (Eigen::Index r = 0; r < h; ++r) {
    Eigen::RowVectorXd row(in);
    get_doubles(f, row.data(), static_cast<std::size_t>(in));
    m.w1.row(r) = row;
  }
  m.b1.resize(h);
  get_doubles(f, m.b1.data(), static_cast<std::size_t>(h));
  m.w2.resize(h);
  get_doubles(f, m.w2.data(), static_cast<std::size_t>(h));
  get_doubles(f, &m.b2, 1);
  if (!f) throw Error("model file: truncated " + path);
  return m;
}

}  // namespace medsensor
