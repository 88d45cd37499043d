#include "curator/Vae.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "curator/Errors.h"

namespace curator {

VaeLoss vaeLoss(const Matrix& x, const Matrix& xhat, const Matrix& mu, const Matrix& logvar, double klWeight) {
    if (!x.sameShape(xhat)) throw DataError("vae loss: reconstruction shape mismatch");
    if (!mu.sameShape(logvar) || mu.rows() != x.rows()) throw DataError("vae loss: latent shape mismatch");
    const double invN = 1.0 / static_cast<double>(x.rows());

    double recon = 0.0;
    for (size_t i = 0; i < x.data().size(); ++i) {
        const double diff = x.data()[i] - xhat.data()[i];
        recon += diff * diff;
    }
    recon *= invN;

    double kl = 0.0;
    for (size_t i = 0; i < mu.data().size(); ++i) {
        const double m = mu.data()[i];
        const double lv = logvar.data()[i];
        kl += 0.5 * (m * m + std::exp(lv) - lv - 1.0);
    }
    kl *= invN;

    VaeLoss out;
    out.recon = recon;
    out.kl = kl;
    out.total = recon + klWeight * kl;
    if (!std::isfinite(out.total)) throw TrainingError("vae loss is not finite");
    return out;
}

Matrix reparameterizeWith(const Matrix& mu, const Matrix& logvar, const Matrix& eps) {
    if (!mu.sameShape(logvar) || !mu.sameShape(eps)) throw DataError("reparameterize: shape mismatch");
    Matrix z(mu.rows(), mu.cols());
    for (size_t i = 0; i < z.data().size(); ++i) {
        z.data()[i] = mu.data()[i] + std::exp(0.5 * logvar.data()[i]) * eps.data()[i];
    }
    return z;
}

Matrix reparameterize(const Matrix& mu, const Matrix& logvar, Rng& rng) {
    Matrix eps(mu.rows(), mu.cols());
    for (double& v : eps.data()) v = rng.normal();
    return reparameterizeWith(mu, logvar, eps);
}

namespace {

void splitHeads(const Matrix& encOut, size_t latentDim, Matrix& mu, Matrix& logvar) {
    const size_t n = encOut.rows();
    mu = Matrix(n, latentDim);
    logvar = Matrix(n, latentDim);
    for (size_t r = 0; r < n; ++r) {
        const double* src = encOut.rowPtr(r);
        std::copy(src, src + latentDim, mu.rowPtr(r));
        std::copy(src + latentDim, src + 2 * latentDim, logvar.rowPtr(r));
    }
}

Matrix sliceRows(const Matrix& src, const std::vector<size_t>& order, size_t from, size_t to) {
    Matrix out(to - from, src.cols());
    for (size_t i = from; i < to; ++i) {
        const double* s = src.rowPtr(order[i]);
        std::copy(s, s + src.cols(), out.rowPtr(i - from));
    }
    return out;
}

}  // namespace

VaeStep vaeForwardBackward(const Network& encoder, const Network& decoder, const Matrix& x, const Matrix& eps,
                           double klWeight) {
    const size_t latentDim = decoder.inputDim();
    if (encoder.outputDim() != 2 * latentDim) throw DataError("vae: encoder output must be twice the latent dim");

    const ForwardPass encPass = forward(encoder, x);
    Matrix mu, logvar;
    splitHeads(encPass.output(), latentDim, mu, logvar);
    const Matrix z = reparameterizeWith(mu, logvar, eps);
    const ForwardPass decPass = forward(decoder, z);
    const Matrix& xhat = decPass.output();

    VaeStep step;
    step.loss = vaeLoss(x, xhat, mu, logvar, klWeight);

    const size_t n = x.rows();
    const double invN = 1.0 / static_cast<double>(n);

    Matrix dXhat(n, x.cols());
    for (size_t i = 0; i < dXhat.data().size(); ++i) {
        dXhat.data()[i] = 2.0 * (xhat.data()[i] - x.data()[i]) * invN;
    }
    step.decoderGrads = backward(decoder, decPass, dXhat);
    const Matrix& dZ = step.decoderGrads.inputGrad;

    // The noise draw is a constant: z = mu + exp(logvar/2)*eps routes
    // gradients to mu directly and to logvar through the scale factor.
    Matrix encUpstream(n, 2 * latentDim);
    for (size_t r = 0; r < n; ++r) {
        const double* dz = dZ.rowPtr(r);
        const double* muRow = mu.rowPtr(r);
        const double* lvRow = logvar.rowPtr(r);
        const double* epsRow = eps.rowPtr(r);
        double* up = encUpstream.rowPtr(r);
        for (size_t j = 0; j < latentDim; ++j) {
            const double dMu = dz[j] + klWeight * muRow[j] * invN;
            const double dLogvar = dz[j] * 0.5 * std::exp(0.5 * lvRow[j]) * epsRow[j] +
                                   klWeight * 0.5 * (std::exp(lvRow[j]) - 1.0) * invN;
            up[j] = dMu;
            up[latentDim + j] = dLogvar;
        }
    }
    step.encoderGrads = backward(encoder, encPass, encUpstream);
    return step;
}

VaeTrainResult trainVae(const Dataset& clean, const EncodingSchema& schema, const AugmentConfig& cfg) {
    if (clean.rowCount() < 10) {
        throw AugmentationError("clean fraction has only " + std::to_string(clean.rowCount()) +
                                " rows; augmentation needs at least 10 (upstream detection may be too aggressive)");
    }
    if (cfg.latentDim < 1) throw ConfigError("latent dimension must be at least 1");
    if (cfg.epochs < 1) throw ConfigError("vae epochs must be at least 1");

    const Matrix data = encodeAllRows(clean, schema);
    const size_t d = schema.encodedWidth;
    const size_t latent = cfg.latentDim;

    VaeTrainResult result;
    result.model.latentDim = latent;
    result.model.schema = schema;
    result.model.columnsTemplate = clean.emptyLike();
    result.model.encoder = initNetwork({d, 50, 12, 2 * latent},
                                       {Activation::ReLU, Activation::ReLU, Activation::Identity},
                                       mixSeed(cfg.seed, 0x656e63));
    result.model.decoder = initNetwork({latent, 12, 50, d},
                                       {Activation::ReLU, Activation::ReLU, Activation::Sigmoid},
                                       mixSeed(cfg.seed, 0x646563));

    AdamState encAdam = AdamState::forNetwork(result.model.encoder, cfg.learningRate);
    AdamState decAdam = AdamState::forNetwork(result.model.decoder, cfg.learningRate);

    Rng rng(mixSeed(cfg.seed, 0x747261696e));
    const size_t n = data.rows();
    const size_t batchSize = std::max<size_t>(1, cfg.batchSize);
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;

    result.history.reserve(cfg.epochs);
    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        VaeLoss epochLoss;
        for (size_t start = 0; start < n; start += batchSize) {
            const size_t end = std::min(n, start + batchSize);
            const Matrix batch = sliceRows(data, order, start, end);
            Matrix eps(batch.rows(), latent);
            for (double& v : eps.data()) v = rng.normal();

            VaeStep step;
            try {
                step = vaeForwardBackward(result.model.encoder, result.model.decoder, batch, eps, cfg.klWeight);
            } catch (const TrainingError& e) {
                throw TrainingError(std::string(e.what()) + " (epoch " + std::to_string(epoch + 1) + ")");
            }
            const double scale = static_cast<double>(end - start);
            epochLoss.recon += step.loss.recon * scale;
            epochLoss.kl += step.loss.kl * scale;
            epochLoss.total += step.loss.total * scale;

            adamStep(result.model.encoder, step.encoderGrads, encAdam);
            adamStep(result.model.decoder, step.decoderGrads, decAdam);
        }
        epochLoss.recon /= static_cast<double>(n);
        epochLoss.kl /= static_cast<double>(n);
        epochLoss.total /= static_cast<double>(n);
        result.history.push_back(epochLoss);
    }
    return result;
}

Dataset generateRows(const VaeModel& model, size_t n, uint64_t seed) {
    Dataset out = model.columnsTemplate.emptyLike();
    if (n == 0) return out;
    Rng rng(seed);
    Matrix z(n, model.latentDim);
    for (double& v : z.data()) v = rng.normal();
    const ForwardPass pass = forward(model.decoder, z);
    std::vector<double> row(model.schema.encodedWidth);
    for (size_t r = 0; r < n; ++r) {
        const double* src = pass.output().rowPtr(r);
        std::copy(src, src + row.size(), row.begin());
        out.appendRow(decodeRow(row, model.schema));
    }
    return out;
}

IntegratedData integrate(const Dataset& dirty, const Dataset& aug) {
    if (!dirty.sameColumnStructure(aug)) {
        throw DataError("integration error: column structure of the synthetic data does not match");
    }
    IntegratedData out;
    out.data = dirty;
    out.synthetic.assign(dirty.rowCount(), 0);
    std::vector<CellValue> cells(aug.colCount());
    for (size_t r = 0; r < aug.rowCount(); ++r) {
        for (size_t c = 0; c < aug.colCount(); ++c) cells[c] = aug.cell(r, c);
        out.data.appendRow(cells);
        out.synthetic.push_back(1);
    }
    return out;
}

void writeProvenanceCsv(const std::vector<uint8_t>& synthetic, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write provenance file: " + path);
    out << "row_index,origin\n";
    for (size_t r = 0; r < synthetic.size(); ++r) {
        out << r << ',' << (synthetic[r] ? "synthetic" : "original") << '\n';
    }
}

void writeVaeHistoryCsv(const std::vector<VaeLoss>& history, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write vae history: " + path);
    out << "epoch,recon_loss,kl_loss,total_loss\n";
    for (size_t i = 0; i < history.size(); ++i) {
        out << (i + 1) << ',' << formatNumber(history[i].recon) << ',' << formatNumber(history[i].kl) << ','
            << formatNumber(history[i].total) << '\n';
    }
}

namespace {

nlohmann::ordered_json schemaToJson(const EncodingSchema& schema) {
    nlohmann::ordered_json doc;
    doc["encoded_width"] = schema.encodedWidth;
    doc["label_block"] = schema.labelBlock;
    switch (schema.task) {
        case Task::Classification: doc["task"] = "classification"; break;
        case Task::Regression: doc["task"] = "regression"; break;
        case Task::None: doc["task"] = "none"; break;
    }
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const auto& block : schema.blocks) {
        nlohmann::ordered_json entry;
        entry["column"] = block.column;
        entry["kind"] = block.kind == ColumnKind::Numeric ? "numeric" : "categorical";
        entry["offset"] = block.offset;
        entry["width"] = block.width;
        entry["min"] = block.min;
        entry["max"] = block.max;
        entry["vocabulary"] = block.vocabulary;
        blocks.push_back(std::move(entry));
    }
    doc["blocks"] = std::move(blocks);
    return doc;
}

EncodingSchema schemaFromJson(const nlohmann::json& doc) {
    EncodingSchema schema;
    schema.encodedWidth = doc.at("encoded_width").get<size_t>();
    schema.labelBlock = doc.at("label_block").get<int>();
    const std::string task = doc.at("task").get<std::string>();
    schema.task = task == "classification" ? Task::Classification
                  : task == "regression"   ? Task::Regression
                                           : Task::None;
    for (const auto& entry : doc.at("blocks")) {
        ColumnEncoding block;
        block.column = entry.at("column").get<size_t>();
        block.kind = entry.at("kind").get<std::string>() == "numeric" ? ColumnKind::Numeric : ColumnKind::Categorical;
        block.offset = entry.at("offset").get<size_t>();
        block.width = entry.at("width").get<size_t>();
        block.min = entry.at("min").get<double>();
        block.max = entry.at("max").get<double>();
        block.vocabulary = entry.at("vocabulary").get<std::vector<std::string>>();
        schema.blocks.push_back(std::move(block));
    }
    return schema;
}

}  // namespace

std::string vaeModelToJson(const VaeModel& model) {
    nlohmann::ordered_json doc;
    doc["format"] = "curator-vae";
    doc["version"] = 1;
    doc["latent_dim"] = model.latentDim;
    doc["encoder"] = nlohmann::ordered_json::parse(networkToJson(model.encoder));
    doc["decoder"] = nlohmann::ordered_json::parse(networkToJson(model.decoder));
    doc["schema"] = schemaToJson(model.schema);
    nlohmann::ordered_json cols = nlohmann::ordered_json::array();
    for (const auto& col : model.columnsTemplate.columns()) {
        nlohmann::ordered_json entry;
        entry["name"] = col.name;
        entry["kind"] = col.kind == ColumnKind::Numeric ? "numeric" : "categorical";
        cols.push_back(std::move(entry));
    }
    doc["columns"] = std::move(cols);
    doc["label_col"] = model.columnsTemplate.labelCol();
    switch (model.columnsTemplate.task()) {
        case Task::Classification: doc["task"] = "classification"; break;
        case Task::Regression: doc["task"] = "regression"; break;
        case Task::None: doc["task"] = "none"; break;
    }
    return doc.dump();
}

VaeModel vaeModelFromJson(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("cannot parse vae model file: ") + e.what());
    }
    if (doc.value("format", "") != "curator-vae") throw DataError("not a vae model file");
    if (doc.value("version", 0) != 1) throw DataError("unsupported vae model file version");
    VaeModel model;
    model.latentDim = doc.at("latent_dim").get<size_t>();
    model.encoder = networkFromJson(doc.at("encoder").dump());
    model.decoder = networkFromJson(doc.at("decoder").dump());
    model.schema = schemaFromJson(doc.at("schema"));

    std::vector<Column> columns;
    for (const auto& entry : doc.at("columns")) {
        Column col;
        col.name = entry.at("name").get<std::string>();
        col.kind = entry.at("kind").get<std::string>() == "numeric" ? ColumnKind::Numeric : ColumnKind::Categorical;
        columns.push_back(std::move(col));
    }
    model.columnsTemplate = Dataset(std::move(columns), 0);
    const int labelCol = doc.at("label_col").get<int>();
    const std::string task = doc.at("task").get<std::string>();
    if (task == "classification") {
        model.columnsTemplate.setLabel(labelCol, Task::Classification);
    } else if (task == "regression") {
        model.columnsTemplate.setLabel(labelCol, Task::Regression);
    }
    return model;
}

}  // namespace curator
