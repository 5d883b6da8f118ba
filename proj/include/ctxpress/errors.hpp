#pragma once

#include <stdexcept>
#include <string>

namespace ctxpress {

/// Base class for every error raised by the compressor.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyDocument : public Error {
public:
    EmptyDocument() : Error("document contains no sentences after cleanup") {}
};

class VocabLoadError : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    ZeroVector() : Error("vector norm is numerically zero") {}
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(got)) {}
};

class ProviderUnavailable : public Error {
public:
    using Error::Error;
};

class IndexBuildFailure : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Wraps a module error with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace ctxpress
