#pragma once

#include <stdexcept>
#include <string>

namespace curator {

// Exit codes used by the CLI: 0 success, 2 config, 3 data, 4 internal,
// 5 augmentation infeasible.
class EngineError : public std::runtime_error {
public:
    explicit EngineError(const std::string& msg) : std::runtime_error(msg) {}
    virtual int exitCode() const { return 4; }
};

class ConfigError : public EngineError {
public:
    explicit ConfigError(const std::string& msg) : EngineError(msg) {}
    int exitCode() const override { return 2; }
};

class DataError : public EngineError {
public:
    explicit DataError(const std::string& msg) : EngineError(msg) {}
    int exitCode() const override { return 3; }
};

class InternalError : public EngineError {
public:
    explicit InternalError(const std::string& msg) : EngineError(msg) {}
    int exitCode() const override { return 4; }
};

class TrainingError : public EngineError {
public:
    explicit TrainingError(const std::string& msg) : EngineError(msg) {}
    int exitCode() const override { return 4; }
};

class AugmentationError : public EngineError {
public:
    explicit AugmentationError(const std::string& msg) : EngineError(msg) {}
    int exitCode() const override { return 5; }
};

}  // namespace curator
