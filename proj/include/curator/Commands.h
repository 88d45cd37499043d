#pragma once

#include <string>

#include "curator/Config.h"

namespace curator {

// Command entry points shared by the CLI binary and the tests. Each
// writes its artifacts under cfg.outputDir and prints a short summary
// to stdout. Errors surface as EngineError subclasses; the CLI maps
// them to exit codes.

struct DetectSummary {
    size_t detectorCount = 0;
    int finalKAttr = 0;
    int finalKClass = 0;
    int iterations = 0;
    size_t flagged = 0;
    size_t cleanRows = 0;
};

DetectSummary cmdDetect(const EngineConfig& cfg);

struct CurateSummary {
    size_t inputRows = 0;
    size_t augmentedRows = 0;
    size_t finalRows = 0;
    size_t cleanFractionRows = 0;
};

CurateSummary cmdCurate(const EngineConfig& cfg);

struct InjectSummary {
    size_t corruptedCells = 0;
    double realizedRate = 0.0;
    bool restoreVerified = false;
};

InjectSummary cmdInject(const EngineConfig& cfg, bool verifyRestore);

void cmdEvaluate(const EngineConfig& cfg);
void cmdSweepK(const EngineConfig& cfg);
void cmdSweepAug(const EngineConfig& cfg);
void cmdSweepErrorRate(const EngineConfig& cfg);

}  // namespace curator
