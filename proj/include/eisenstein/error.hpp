#pragma once

#include <stdexcept>
#include <string>

namespace eis {

enum class Errc {
    SingularMatrix,
    DegreeError,
    MismatchedField,
    DivisionByZero,
    ShapeError,
    NotHomogeneous,
    InvalidLinearForm,
    ZeroFormValue,
    NotTotallyReal,
    NotIrreducible,
    NotMonic,
    SingularGram,
    ZeroIdeal,
    NoDegreeOnePrime,
    IndexDivisor,
    IndexNotPrime,
    UnitsRequired,
    NotTotallyPositive,
    NotCongruentOne,
    DependentUnits,
    NotFoundWithinBound,
    ChainDegenerate,
    CrossCheckFailure,
    MissingClassData,
    LevelTooSmall,
    PrecisionExhausted,
    ResidueFieldMismatch,
    RefinementLimit,
    NotPIntegral,
    Unsupported,
    Config,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace eis
