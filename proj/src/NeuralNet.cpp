#include "curator/NeuralNet.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "curator/Dataset.h"
#include "curator/Errors.h"
#include "curator/Rng.h"

namespace curator {

std::string activationName(Activation a) {
    switch (a) {
        case Activation::ReLU: return "relu";
        case Activation::Identity: return "identity";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "identity";
}

Activation activationFromName(const std::string& name) {
    if (name == "relu") return Activation::ReLU;
    if (name == "identity") return Activation::Identity;
    if (name == "sigmoid") return Activation::Sigmoid;
    throw ConfigError("unknown activation: " + name);
}

Network initNetwork(const std::vector<size_t>& dims, const std::vector<Activation>& activations, uint64_t seed) {
    if (dims.size() < 2) throw ConfigError("network needs at least an input and an output dimension");
    for (size_t d : dims) {
        if (d == 0) throw ConfigError("network layer dimensions must be positive");
    }
    if (activations.size() != dims.size() - 1) {
        throw ConfigError("network needs one activation per layer");
    }
    Network net;
    net.seed = seed;
    Rng rng(seed);
    for (size_t i = 0; i + 1 < dims.size(); ++i) {
        Layer layer;
        const size_t fanIn = dims[i];
        const size_t fanOut = dims[i + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fanIn + fanOut));
        layer.weights = Matrix(fanOut, fanIn);
        for (double& w : layer.weights.data()) w = rng.uniform(-limit, limit);
        layer.bias.assign(fanOut, 0.0);
        layer.activation = activations[i];
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

void applyActivation(Matrix& m, Activation act) {
    switch (act) {
        case Activation::Identity:
            return;
        case Activation::ReLU:
            for (double& v : m.data()) v = v > 0.0 ? v : 0.0;
            return;
        case Activation::Sigmoid:
            for (double& v : m.data()) v = 1.0 / (1.0 + std::exp(-v));
            return;
    }
}

// grad *= f'(z) expressed through the post-activation value.
void applyActivationGrad(Matrix& grad, const Matrix& out, Activation act) {
    switch (act) {
        case Activation::Identity:
            return;
        case Activation::ReLU:
            for (size_t i = 0; i < grad.data().size(); ++i) {
                if (out.data()[i] <= 0.0) grad.data()[i] = 0.0;
            }
            return;
        case Activation::Sigmoid:
            for (size_t i = 0; i < grad.data().size(); ++i) {
                const double s = out.data()[i];
                grad.data()[i] *= s * (1.0 - s);
            }
            return;
    }
}

}  // namespace

ForwardPass forward(const Network& net, const Matrix& input) {
    if (input.cols() != net.inputDim()) {
        throw DataError("forward: input width " + std::to_string(input.cols()) + " does not match network input " +
                        std::to_string(net.inputDim()));
    }
    ForwardPass pass;
    pass.activations.reserve(net.layers.size() + 1);
    pass.activations.push_back(input);
    for (const auto& layer : net.layers) {
        const Matrix& prev = pass.activations.back();
        const size_t n = prev.rows();
        const size_t in = layer.weights.cols();
        const size_t out = layer.weights.rows();
        Matrix next(n, out);
        for (size_t r = 0; r < n; ++r) {
            const double* x = prev.rowPtr(r);
            double* y = next.rowPtr(r);
            for (size_t o = 0; o < out; ++o) {
                const double* w = layer.weights.rowPtr(o);
                double acc = layer.bias[o];
                for (size_t i = 0; i < in; ++i) acc += w[i] * x[i];
                y[o] = acc;
            }
        }
        applyActivation(next, layer.activation);
        pass.activations.push_back(std::move(next));
    }
    return pass;
}

Gradients backward(const Network& net, const ForwardPass& pass, const Matrix& upstreamGrad) {
    const size_t nLayers = net.layers.size();
    if (pass.activations.size() != nLayers + 1) throw DataError("backward: forward pass does not match network");
    if (!upstreamGrad.sameShape(pass.activations.back())) {
        throw DataError("backward: upstream gradient shape mismatch");
    }

    Gradients grads;
    grads.weightGrads.resize(nLayers);
    grads.biasGrads.resize(nLayers);

    Matrix delta = upstreamGrad;
    for (size_t li = nLayers; li-- > 0;) {
        const Layer& layer = net.layers[li];
        const Matrix& layerOut = pass.activations[li + 1];
        const Matrix& layerIn = pass.activations[li];
        const size_t n = delta.rows();
        const size_t out = layer.weights.rows();
        const size_t in = layer.weights.cols();

        applyActivationGrad(delta, layerOut, layer.activation);

        Matrix dW(out, in);
        std::vector<double> db(out, 0.0);
        for (size_t r = 0; r < n; ++r) {
            const double* d = delta.rowPtr(r);
            const double* x = layerIn.rowPtr(r);
            for (size_t o = 0; o < out; ++o) {
                const double g = d[o];
                if (g == 0.0) continue;
                double* wrow = dW.rowPtr(o);
                for (size_t i = 0; i < in; ++i) wrow[i] += g * x[i];
                db[o] += g;
            }
        }

        Matrix prevDelta(n, in);
        for (size_t r = 0; r < n; ++r) {
            const double* d = delta.rowPtr(r);
            double* p = prevDelta.rowPtr(r);
            for (size_t o = 0; o < out; ++o) {
                const double g = d[o];
                if (g == 0.0) continue;
                const double* wrow = layer.weights.rowPtr(o);
                for (size_t i = 0; i < in; ++i) p[i] += g * wrow[i];
            }
        }

        grads.weightGrads[li] = std::move(dW);
        grads.biasGrads[li] = std::move(db);
        delta = std::move(prevDelta);
    }
    grads.inputGrad = std::move(delta);
    return grads;
}

AdamState AdamState::forNetwork(const Network& net, double learningRate) {
    AdamState state;
    state.learningRate = learningRate;
    for (const auto& layer : net.layers) {
        state.weightM.emplace_back(layer.weights.rows(), layer.weights.cols());
        state.weightV.emplace_back(layer.weights.rows(), layer.weights.cols());
        state.biasM.emplace_back(layer.bias.size(), 0.0);
        state.biasV.emplace_back(layer.bias.size(), 0.0);
    }
    return state;
}

void adamStep(Network& net, const Gradients& grads, AdamState& state) {
    if (grads.weightGrads.size() != net.layers.size()) throw TrainingError("adam: gradient/network mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (size_t li = 0; li < net.layers.size(); ++li) {
        Layer& layer = net.layers[li];
        const std::string blockName = "layer " + std::to_string(li);
        auto& wm = state.weightM[li].data();
        auto& wv = state.weightV[li].data();
        auto& wdata = layer.weights.data();
        const auto& wg = grads.weightGrads[li].data();
        for (size_t i = 0; i < wdata.size(); ++i) {
            const double g = wg[i];
            if (!std::isfinite(g)) throw TrainingError("non-finite gradient in " + blockName + " weights");
            wm[i] = state.beta1 * wm[i] + (1.0 - state.beta1) * g;
            wv[i] = state.beta2 * wv[i] + (1.0 - state.beta2) * g * g;
            const double mHat = wm[i] / bc1;
            const double vHat = wv[i] / bc2;
            wdata[i] -= state.learningRate * mHat / (std::sqrt(vHat) + state.epsilon);
        }
        auto& bm = state.biasM[li];
        auto& bv = state.biasV[li];
        auto& bias = layer.bias;
        const auto& bg = grads.biasGrads[li];
        for (size_t i = 0; i < bias.size(); ++i) {
            const double g = bg[i];
            if (!std::isfinite(g)) throw TrainingError("non-finite gradient in " + blockName + " bias");
            bm[i] = state.beta1 * bm[i] + (1.0 - state.beta1) * g;
            bv[i] = state.beta2 * bv[i] + (1.0 - state.beta2) * g * g;
            const double mHat = bm[i] / bc1;
            const double vHat = bv[i] / bc2;
            bias[i] -= state.learningRate * mHat / (std::sqrt(vHat) + state.epsilon);
        }
    }
}

LossResult mseLoss(const Matrix& pred, const Matrix& target) {
    if (!pred.sameShape(target)) throw DataError("mse: shape mismatch");
    LossResult out;
    out.grad = Matrix(pred.rows(), pred.cols());
    const double invN = 1.0 / static_cast<double>(pred.rows());
    double total = 0.0;
    for (size_t i = 0; i < pred.data().size(); ++i) {
        const double diff = pred.data()[i] - target.data()[i];
        total += diff * diff;
        out.grad.data()[i] = 2.0 * diff * invN;
    }
    out.loss = total * invN;
    return out;
}

LossResult crossEntropyLoss(const Matrix& pred, const Matrix& target) {
    if (!pred.sameShape(target)) throw DataError("cross-entropy: shape mismatch");
    LossResult out;
    out.grad = Matrix(pred.rows(), pred.cols());
    const size_t n = pred.rows();
    const size_t k = pred.cols();
    const double invN = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (size_t r = 0; r < n; ++r) {
        const double* logits = pred.rowPtr(r);
        const double* t = target.rowPtr(r);
        double maxLogit = logits[0];
        for (size_t j = 1; j < k; ++j) maxLogit = std::max(maxLogit, logits[j]);
        double sum = 0.0;
        for (size_t j = 0; j < k; ++j) sum += std::exp(logits[j] - maxLogit);
        const double logSum = std::log(sum) + maxLogit;
        double* g = out.grad.rowPtr(r);
        for (size_t j = 0; j < k; ++j) {
            const double p = std::exp(logits[j] - logSum);
            g[j] = (p - t[j]) * invN;
            if (t[j] > 0.0) total += t[j] * (logSum - logits[j]);
        }
    }
    out.loss = total * invN;
    return out;
}

namespace {

Matrix sliceRows(const Matrix& src, const std::vector<size_t>& order, size_t from, size_t to) {
    Matrix out(to - from, src.cols());
    for (size_t i = from; i < to; ++i) {
        const double* s = src.rowPtr(order[i]);
        std::copy(s, s + src.cols(), out.rowPtr(i - from));
    }
    return out;
}

}  // namespace

std::vector<EpochLoss> train(Network& net, const Matrix& inputs, const Matrix& targets, LossKind loss,
                             const TrainOptions& options, LossFn customLoss) {
    if (inputs.rows() == 0) throw TrainingError("training set is empty");
    if (inputs.rows() != targets.rows()) throw TrainingError("inputs and targets disagree on row count");
    if (options.epochs < 1) throw ConfigError("epochs must be at least 1");
    if (loss == LossKind::Custom && !customLoss) throw ConfigError("custom loss requires a loss function");

    LossFn lossFn;
    switch (loss) {
        case LossKind::Mse: lossFn = mseLoss; break;
        case LossKind::CrossEntropy: lossFn = crossEntropyLoss; break;
        case LossKind::Custom: lossFn = std::move(customLoss); break;
    }

    AdamState adam = AdamState::forNetwork(net, options.learningRate);
    Rng rng(options.seed);
    const size_t n = inputs.rows();
    const size_t batchSize = std::max<size_t>(1, options.batchSize);

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<EpochLoss> history;
    history.reserve(options.epochs);
    for (size_t epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(order);
        double lossSum = 0.0;
        for (size_t start = 0; start < n; start += batchSize) {
            const size_t end = std::min(n, start + batchSize);
            const Matrix batchX = sliceRows(inputs, order, start, end);
            const Matrix batchY = sliceRows(targets, order, start, end);
            const ForwardPass pass = forward(net, batchX);
            const LossResult result = lossFn(pass.output(), batchY);
            if (!std::isfinite(result.loss)) {
                throw TrainingError("training diverged at epoch " + std::to_string(epoch + 1));
            }
            lossSum += result.loss * static_cast<double>(end - start);
            const Gradients grads = backward(net, pass, result.grad);
            adamStep(net, grads, adam);
        }
        EpochLoss entry;
        entry.train = lossSum / static_cast<double>(n);
        if (options.valInputs != nullptr && options.valTargets != nullptr && options.valInputs->rows() > 0) {
            const ForwardPass valPass = forward(net, *options.valInputs);
            entry.validation = lossFn(valPass.output(), *options.valTargets).loss;
        }
        history.push_back(entry);
    }
    return history;
}

void writeLossHistoryCsv(const std::vector<EpochLoss>& history, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write loss history: " + path);
    out << "epoch,train_loss,val_loss\n";
    for (size_t i = 0; i < history.size(); ++i) {
        out << (i + 1) << ',' << formatNumber(history[i].train) << ',';
        if (history[i].validation.has_value()) out << formatNumber(*history[i].validation);
        out << '\n';
    }
}

std::string networkToJson(const Network& net) {
    nlohmann::ordered_json doc;
    doc["format"] = "curator-network";
    doc["version"] = 1;
    doc["seed"] = net.seed;
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto& layer : net.layers) {
        nlohmann::ordered_json entry;
        entry["out"] = layer.weights.rows();
        entry["in"] = layer.weights.cols();
        entry["activation"] = activationName(layer.activation);
        entry["weights"] = layer.weights.data();
        entry["bias"] = layer.bias;
        layers.push_back(std::move(entry));
    }
    doc["layers"] = std::move(layers);
    return doc.dump();
}

Network networkFromJson(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("cannot parse network file: ") + e.what());
    }
    if (doc.value("format", "") != "curator-network") throw DataError("not a network file");
    if (doc.value("version", 0) != 1) throw DataError("unsupported network file version");
    Network net;
    net.seed = doc.value("seed", 0ULL);
    for (const auto& entry : doc.at("layers")) {
        Layer layer;
        const size_t out = entry.at("out").get<size_t>();
        const size_t in = entry.at("in").get<size_t>();
        layer.weights = Matrix(out, in);
        const auto weights = entry.at("weights").get<std::vector<double>>();
        if (weights.size() != out * in) throw DataError("network file weight shape mismatch");
        layer.weights.data() = weights;
        layer.bias = entry.at("bias").get<std::vector<double>>();
        if (layer.bias.size() != out) throw DataError("network file bias shape mismatch");
        layer.activation = activationFromName(entry.at("activation").get<std::string>());
        net.layers.push_back(std::move(layer));
    }
    return net;
}

}  // namespace curator
