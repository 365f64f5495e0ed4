#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "medsensor/window.hpp"

namespace medsensor {

struct MlpArchitecture {
  std::size_t input_size = 4500;
  std::size_t hidden_size = 90;
  std::size_t output_size = 1;  // single presence/absence neuron

  std::size_t parameter_count() const {
    return hidden_size * input_size + hidden_size + hidden_size + 1;
  }
};

// 3W-H-1 feed-forward network: ReLU hidden layer, sigmoid output.
struct MlpModel {
  MlpArchitecture arch;
  Eigen::MatrixXd w1;     // hidden x input
  Eigen::VectorXd b1;     // hidden
  Eigen::RowVectorXd w2;  // 1 x hidden
  double b2 = 0.0;
};

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 50;
  Optimizer optimizer = Optimizer::Adam;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct Gradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::RowVectorXd w2;
  double b2 = 0.0;
};

struct EpochStats {
  double loss = 0.0;
  double train_accuracy = 0.0;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochStats> history;
  bool aborted = false;       // NonFiniteLoss: best-so-far model returned
  std::size_t abort_epoch = 0;
};

using VectorRefs = std::vector<const FeatureVector*>;

// He-uniform W1 over fan-in, Xavier-uniform W2, zero biases.
MlpModel init(const MlpArchitecture& arch, std::uint64_t seed);

double forward(const MlpModel& model, std::span<const float> values);

// One probability per row of X (rows are samples).
Eigen::VectorXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& X);

// Mean binary cross-entropy with probabilities clamped to [eps, 1-eps].
double loss(const Eigen::VectorXd& probabilities, const Eigen::VectorXd& labels);

Gradients gradient(const MlpModel& model, const Eigen::MatrixXd& X,
                   const Eigen::VectorXd& y);

TrainResult train(MlpModel model, const VectorRefs& data, const TrainConfig& config);

int predict(const MlpModel& model, std::span<const float> values,
            double threshold = 0.5);

// Versioned binary model file: magic MSNN, version, architecture triple,
// then little-endian 64-bit parameters in W1, b1, W2, b2 order.
void save_model(const std::string& path, const MlpModel& model);
MlpModel load_model(const std::string& path);

Eigen::MatrixXd to_matrix(const VectorRefs& data, std::size_t input_size);
Eigen::VectorXd to_labels(const VectorRefs& data);

}  // namespace medsensor
