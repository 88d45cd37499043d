#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curator/Dataset.h"
#include "curator/Encoding.h"
#include "curator/Matrix.h"
#include "curator/NeuralNet.h"
#include "curator/Rng.h"

namespace curator {

struct AugmentConfig {
    size_t nAug = 0;
    size_t latentDim = 8;
    size_t epochs = 500;
    double klWeight = 1.0;
    double learningRate = 1e-3;
    size_t batchSize = 64;
    uint64_t seed = 0;
};

// Encoder d -> 50 -> 12 -> 2L (mu and log-variance heads), decoder
// L -> 12 -> 50 -> d with a sigmoid output to pair with min-max
// encoded data. Hidden layers are ReLU.
struct VaeModel {
    Network encoder;
    Network decoder;
    size_t latentDim = 0;
    EncodingSchema schema;
    Dataset columnsTemplate;  // zero-row dataset carrying column metadata
};

struct VaeLoss {
    double recon = 0.0;
    double kl = 0.0;
    double total = 0.0;
};

// recon: mean over the batch of the per-row sum of squared errors.
// kl: mean over the batch of 0.5 * sum_j(mu^2 + exp(logvar) - logvar - 1).
VaeLoss vaeLoss(const Matrix& x, const Matrix& xhat, const Matrix& mu, const Matrix& logvar, double klWeight);

// z = mu + exp(logvar/2) * eps with eps ~ N(0,1) from the given stream.
Matrix reparameterize(const Matrix& mu, const Matrix& logvar, Rng& rng);
Matrix reparameterizeWith(const Matrix& mu, const Matrix& logvar, const Matrix& eps);

// One full differentiable pass with a fixed noise draw: encoder forward,
// reparameterize, decoder forward, loss, and exact gradients for both
// networks. Shared by training and by the finite-difference checks.
struct VaeStep {
    VaeLoss loss;
    Gradients encoderGrads;
    Gradients decoderGrads;
};
VaeStep vaeForwardBackward(const Network& encoder, const Network& decoder, const Matrix& x, const Matrix& eps,
                           double klWeight);

struct VaeTrainResult {
    VaeModel model;
    std::vector<VaeLoss> history;  // one entry per epoch
};

// Trains on the complete rows of the clean fraction (at least 10 rows,
// otherwise augmentation is refused).
VaeTrainResult trainVae(const Dataset& clean, const EncodingSchema& schema, const AugmentConfig& cfg);

// Decodes n latent draws from the standard-normal prior into rows.
Dataset generateRows(const VaeModel& model, size_t n, uint64_t seed);

struct IntegratedData {
    Dataset data;                    // dirty rows first, then synthetic
    std::vector<uint8_t> synthetic;  // per-row provenance flag
};
IntegratedData integrate(const Dataset& dirty, const Dataset& aug);

void writeProvenanceCsv(const std::vector<uint8_t>& synthetic, const std::string& path);
void writeVaeHistoryCsv(const std::vector<VaeLoss>& history, const std::string& path);

std::string vaeModelToJson(const VaeModel& model);
VaeModel vaeModelFromJson(const std::string& text);

}  // namespace curator
