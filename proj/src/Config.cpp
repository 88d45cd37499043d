#include "curator/Config.h"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "curator/Errors.h"

namespace curator {

namespace {

using nlohmann::json;

ColumnKind kindFromName(const std::string& name) {
    if (name == "numeric") return ColumnKind::Numeric;
    if (name == "categorical") return ColumnKind::Categorical;
    throw ConfigError("unknown column kind: " + name);
}

Task taskFromName(const std::string& name) {
    if (name == "classification") return Task::Classification;
    if (name == "regression") return Task::Regression;
    if (name == "none") return Task::None;
    throw ConfigError("unknown task: " + name);
}

std::vector<FdRule> parseRules(const json& doc) {
    std::vector<FdRule> rules;
    for (const auto& entry : doc) {
        FdRule rule;
        rule.lhs = entry.at("lhs").get<std::vector<std::string>>();
        rule.rhs = entry.at("rhs").get<std::string>();
        rules.push_back(std::move(rule));
    }
    return rules;
}

DetectorSpec parseDetector(const json& entry, const std::vector<FdRule>& sharedRules) {
    const std::string kind = entry.at("kind").get<std::string>();
    DetectorSpec spec;
    if (kind == "missing") {
        spec = DetectorSpec::missing();
    } else if (kind == "outlier_sd") {
        spec = DetectorSpec::outlierSd(entry.value("param", 3.0));
    } else if (kind == "outlier_iqr") {
        spec = DetectorSpec::outlierIqr(entry.value("param", 1.5));
    } else if (kind == "duplicates") {
        spec = DetectorSpec::duplicates();
    } else if (kind == "fd") {
        spec = DetectorSpec::fd(entry.contains("rules") ? parseRules(entry.at("rules")) : sharedRules);
    } else if (kind == "rare_typo") {
        spec = DetectorSpec::rareTypo(entry.value("min_support", 0.01), entry.value("max_edit", 1));
    } else if (kind == "external") {
        if (!entry.contains("path")) throw ConfigError("external detector needs a path");
        spec = DetectorSpec::external(entry.value("id", ""), entry.at("path").get<std::string>());
    } else {
        throw ConfigError("unknown detector kind: " + kind);
    }
    if (entry.contains("id")) spec.id = entry.at("id").get<std::string>();
    return spec;
}

}  // namespace

EngineConfig parseEngineConfig(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);  // allow comments
    } catch (const json::exception& e) {
        throw ConfigError(std::string("cannot parse config: ") + e.what());
    }

    EngineConfig cfg;
    try {
        cfg.input = doc.value("input", "");
        cfg.outputDir = doc.value("output_dir", "out");
        cfg.seed = doc.value("seed", 1ULL);

        if (doc.contains("missing_tokens")) {
            cfg.csv.missingTokens = doc.at("missing_tokens").get<std::vector<std::string>>();
        }
        if (doc.contains("schema_hints")) {
            for (const auto& [name, kind] : doc.at("schema_hints").items()) {
                cfg.csv.schemaHint[name] = kindFromName(kind.get<std::string>());
            }
        }
        cfg.csv.labelColumn = doc.value("label", "");
        if (doc.contains("task")) cfg.csv.task = taskFromName(doc.at("task").get<std::string>());

        if (doc.contains("fd_rules")) cfg.fdRules = parseRules(doc.at("fd_rules"));
        if (doc.contains("detectors")) {
            for (const auto& entry : doc.at("detectors")) {
                cfg.detectors.push_back(parseDetector(entry, cfg.fdRules));
            }
        }

        if (doc.contains("voting")) {
            const auto& voting = doc.at("voting");
            cfg.voting.kInit = voting.value("k_init", 2);
            cfg.voting.alphaU = voting.value("alpha_u", 1);
            cfg.voting.iterationCap = voting.value("iteration_cap", 0);
            cfg.voting.regressionBins = voting.value("regression_bins", 0);
        }

        if (doc.contains("augmentation")) {
            const auto& aug = doc.at("augmentation");
            cfg.augmentation.nAug = aug.value("n_aug", 0ULL);
            cfg.augmentation.latentDim = aug.value("latent_dim", 8ULL);
            cfg.augmentation.epochs = aug.value("epochs", 500ULL);
            cfg.augmentation.klWeight = aug.value("kl_weight", 1.0);
            cfg.augmentation.learningRate = aug.value("learning_rate", 1e-3);
            cfg.augmentation.batchSize = aug.value("batch_size", 64ULL);
        }

        if (doc.contains("injection")) {
            const auto& inj = doc.at("injection");
            InjectionPlan plan;
            plan.gamma = inj.value("gamma", 0.1);
            if (inj.contains("mix")) {
                const auto& mix = inj.at("mix");
                plan.mixMv = mix.value("MV", 0.0);
                plan.mixOt = mix.value("OT", 0.0);
                plan.mixTp = mix.value("TP", 0.0);
                plan.mixRv = mix.value("RV", 0.0);
            } else {
                plan.mixMv = 1.0;
            }
            plan.outlierScale = inj.value("outlier_scale", 5.0);
            plan.fdRules = cfg.fdRules;
            cfg.injection = plan;
        }

        if (doc.contains("harness")) {
            const auto& h = doc.at("harness");
            cfg.harness.testFraction = h.value("test_fraction", 0.25);
            cfg.harness.repeats = h.value("repeats", 3ULL);
            if (h.contains("variants")) {
                cfg.harness.variants = h.at("variants").get<std::vector<std::string>>();
            }
            cfg.harness.minKThreshold = h.value("mink_k", 3);
            if (h.contains("k_range")) cfg.harness.kRange = h.at("k_range").get<std::vector<int>>();
            if (h.contains("aug_sizes")) cfg.harness.augSizes = h.at("aug_sizes").get<std::vector<size_t>>();
            if (h.contains("gamma_range")) {
                cfg.harness.gammaRange = h.at("gamma_range").get<std::vector<double>>();
            }
            if (h.contains("model")) {
                const auto& m = h.at("model");
                if (m.contains("hidden")) cfg.harness.model.hidden = m.at("hidden").get<std::vector<size_t>>();
                cfg.harness.model.epochs = m.value("epochs", 500ULL);
                cfg.harness.model.batchSize = m.value("batch_size", 64ULL);
                cfg.harness.model.learningRate = m.value("learning_rate", 1e-3);
                cfg.harness.model.valFraction = m.value("val_fraction", 0.1);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }

    cfg.validate();
    return cfg;
}

EngineConfig loadEngineConfig(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parseEngineConfig(buffer.str());
}

void EngineConfig::validate() const {
    if (csv.task.has_value() && *csv.task != Task::None && csv.labelColumn.empty()) {
        throw ConfigError("a task needs a label column");
    }
    if (voting.kInit < 2) throw ConfigError("voting.k_init must be at least 2");
    if (voting.alphaU < 1) throw ConfigError("voting.alpha_u must be at least 1");
    if (voting.iterationCap < 0) throw ConfigError("voting.iteration_cap must not be negative");

    std::set<std::string> seenIds;
    for (const auto& spec : detectors) {
        if (!seenIds.insert(spec.effectiveId()).second) {
            throw ConfigError("duplicate detector id: " + spec.effectiveId() +
                              " (give explicit ids to repeated kinds)");
        }
        if (spec.kind == DetectorKind::External && spec.path.empty()) {
            throw ConfigError("external detector needs a path");
        }
        if ((spec.kind == DetectorKind::OutlierSd || spec.kind == DetectorKind::OutlierIqr) && spec.param <= 0.0) {
            throw ConfigError("outlier detector parameter must be positive");
        }
    }

    if (injection.has_value()) injection->validate();

    if (!(harness.testFraction > 0.0 && harness.testFraction < 1.0)) {
        throw ConfigError("harness.test_fraction must lie in (0,1)");
    }
    if (harness.repeats < 1) throw ConfigError("harness.repeats must be at least 1");
    for (const auto& variant : harness.variants) {
        if (variant != "clean" && variant != "dirty" && variant != "autocure" && variant != "mink" &&
            variant != "std_impute") {
            throw ConfigError("unknown harness variant: " + variant);
        }
    }
    for (double gamma : harness.gammaRange) {
        if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("harness.gamma_range values must lie in (0,1)");
    }
}

std::vector<DetectorSpec> EngineConfig::registryOrDefault() const {
    if (!detectors.empty()) return detectors;
    std::vector<DetectorSpec> registry = {
        DetectorSpec::missing(),
        DetectorSpec::outlierSd(3.0),
        DetectorSpec::outlierIqr(1.5),
        DetectorSpec::duplicates(),
    };
    if (!fdRules.empty()) registry.push_back(DetectorSpec::fd(fdRules));
    registry.push_back(DetectorSpec::rareTypo());
    return registry;
}

HarnessOptions EngineConfig::harnessOptions() const {
    HarnessOptions opts;
    opts.testFraction = harness.testFraction;
    opts.registry = registryOrDefault();
    opts.kInit = voting.kInit;
    opts.alphaU = voting.alphaU;
    opts.iterationCap = voting.iterationCap;
    opts.regressionBins = voting.regressionBins;
    opts.model = harness.model;
    opts.repeats = harness.repeats;
    return opts;
}

}  // namespace curator
