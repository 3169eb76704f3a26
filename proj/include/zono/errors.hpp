#ifndef ZONO_ERRORS_HPP
#define ZONO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace zono {

// Base for all domain errors raised by the library. `kind()` is a stable
// machine-readable tag used by the CLI error reporting.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& detail)
        : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

struct ComplexityRefused : Error {
    explicit ComplexityRefused(const std::string& detail) : Error("ComplexityRefused", detail) {}
};

struct InvalidDeltas : Error {
    explicit InvalidDeltas(const std::string& detail) : Error("InvalidDeltas", detail) {}
};

struct SolverStall : Error {
    explicit SolverStall(const std::string& detail) : Error("SolverStall", detail) {}
};

struct Infeasible : Error {
    explicit Infeasible(const std::string& detail) : Error("Infeasible", detail) {}
};

struct BadMagic : Error {
    explicit BadMagic(const std::string& detail) : Error("BadMagic", detail) {}
};

struct TruncatedPayload : Error {
    explicit TruncatedPayload(const std::string& detail) : Error("TruncatedPayload", detail) {}
};

struct UnsupportedElementType : Error {
    explicit UnsupportedElementType(const std::string& detail) : Error("UnsupportedElementType", detail) {}
};

struct NotEnoughExamples : Error {
    explicit NotEnoughExamples(const std::string& detail) : Error("NotEnoughExamples", detail) {}
};

struct LabelsNotBinary : Error {
    explicit LabelsNotBinary(const std::string& detail) : Error("LabelsNotBinary", detail) {}
};

struct DivergenceDetected : Error {
    explicit DivergenceDetected(const std::string& detail) : Error("DivergenceDetected", detail) {}
};

struct NotGeneralPosition : Error {
    explicit NotGeneralPosition(const std::string& detail) : Error("NotGeneralPosition", detail) {}
};

struct BoundaryTie : Error {
    explicit BoundaryTie(const std::string& detail) : Error("BoundaryTie", detail) {}
};

struct InvalidInput : Error {
    explicit InvalidInput(const std::string& detail) : Error("InvalidInput", detail) {}
};

}  // namespace zono

#endif
