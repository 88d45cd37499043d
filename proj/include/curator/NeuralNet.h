#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curator/Matrix.h"

namespace curator {

enum class Activation { ReLU, Identity, Sigmoid };

std::string activationName(Activation a);
Activation activationFromName(const std::string& name);

struct Layer {
    Matrix weights;             // out x in
    std::vector<double> bias;   // out
    Activation activation = Activation::Identity;
};

struct Network {
    std::vector<Layer> layers;
    uint64_t seed = 0;

    size_t inputDim() const { return layers.empty() ? 0 : layers.front().weights.cols(); }
    size_t outputDim() const { return layers.empty() ? 0 : layers.back().weights.rows(); }
};

// Glorot-uniform weights, zero biases, deterministic per seed.
Network initNetwork(const std::vector<size_t>& dims, const std::vector<Activation>& activations, uint64_t seed);

// activations[0] is the input batch, activations[i] the output of layer i.
struct ForwardPass {
    std::vector<Matrix> activations;

    const Matrix& output() const { return activations.back(); }
};

ForwardPass forward(const Network& net, const Matrix& input);

struct Gradients {
    std::vector<Matrix> weightGrads;
    std::vector<std::vector<double>> biasGrads;
    Matrix inputGrad;  // gradient w.r.t. the input batch
};

// Exact gradients of the composed network given dLoss/dOutput.
Gradients backward(const Network& net, const ForwardPass& pass, const Matrix& upstreamGrad);

struct AdamState {
    double learningRate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
    std::vector<Matrix> weightM, weightV;
    std::vector<std::vector<double>> biasM, biasV;

    static AdamState forNetwork(const Network& net, double learningRate);
};

void adamStep(Network& net, const Gradients& grads, AdamState& state);

struct LossResult {
    double loss = 0.0;
    Matrix grad;  // dLoss/dPred, already divided by the batch size
};

// Mean over the batch of the per-row sum of squared errors.
LossResult mseLoss(const Matrix& pred, const Matrix& target);
// Softmax cross-entropy over logits; targets are one-hot rows.
LossResult crossEntropyLoss(const Matrix& pred, const Matrix& target);

enum class LossKind { Mse, CrossEntropy, Custom };

using LossFn = std::function<LossResult(const Matrix& pred, const Matrix& target)>;

struct TrainOptions {
    size_t epochs = 500;
    size_t batchSize = 64;
    double learningRate = 1e-3;
    uint64_t seed = 0;
    const Matrix* valInputs = nullptr;
    const Matrix* valTargets = nullptr;
};

struct EpochLoss {
    double train = 0.0;
    std::optional<double> validation;
};

// Full-pass mini-batch training with a per-epoch seeded shuffle.
// History has exactly `epochs` entries.
std::vector<EpochLoss> train(Network& net, const Matrix& inputs, const Matrix& targets, LossKind loss,
                             const TrainOptions& options, LossFn customLoss = {});

void writeLossHistoryCsv(const std::vector<EpochLoss>& history, const std::string& path);

std::string networkToJson(const Network& net);
Network networkFromJson(const std::string& text);

}  // namespace curator
