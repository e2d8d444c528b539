#pragma once

#include <stdexcept>
#include <string>

namespace endo {

// Base class for all library errors. Subclasses exist so callers can
// distinguish bad input data from bad configuration from runtime failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("io: " + msg) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error("format: " + msg) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error("shape: " + msg) {}
};

class ParamError : public Error {
public:
    explicit ParamError(const std::string& msg) : Error("param: " + msg) {}
};

class SpecError : public Error {
public:
    explicit SpecError(const std::string& msg) : Error("spec: " + msg) {}
};

class DatasetError : public Error {
public:
    explicit DatasetError(const std::string& msg) : Error("dataset: " + msg) {}
};

class PathError : public Error {
public:
    explicit PathError(const std::string& msg) : Error("path: " + msg) {}
};

class TrainingError : public Error {
public:
    explicit TrainingError(const std::string& msg) : Error("training: " + msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("config: " + msg) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error("domain: " + msg) {}
};

} // namespace endo
