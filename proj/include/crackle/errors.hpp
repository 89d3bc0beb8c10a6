#pragma once

#include <stdexcept>
#include <string>

namespace crackle {

enum class ErrorClass { Parameter, Domain, Solver, Structural, Unsupported, Config, Io };

const char* error_class_name(ErrorClass c);

class Error : public std::runtime_error {
public:
    Error(ErrorClass c, const std::string& what) : std::runtime_error(what), cls_(c) {}
    ErrorClass error_class() const { return cls_; }

private:
    ErrorClass cls_;
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& w) : Error(ErrorClass::Parameter, w) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(ErrorClass::Domain, w) {}
};
struct SolverError : Error {
    explicit SolverError(const std::string& w) : Error(ErrorClass::Solver, w) {}
};
struct StructuralError : Error {
    explicit StructuralError(const std::string& w) : Error(ErrorClass::Structural, w) {}
};
struct UnsupportedError : Error {
    explicit UnsupportedError(const std::string& w) : Error(ErrorClass::Unsupported, w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorClass::Config, w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorClass::Io, w) {}
};

}  // namespace crackle
