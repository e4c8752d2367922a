#pragma once

#include <stdexcept>
#include <string>

namespace coorbit {

// Base for all library errors; `kind()` is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define COORBIT_DEFINE_ERROR(Name)                                    \
    struct Name : Error {                                             \
        explicit Name(const std::string& msg) : Error(#Name, msg) {} \
    }

COORBIT_DEFINE_ERROR(AntisymmetryViolation);
COORBIT_DEFINE_ERROR(JacobiViolation);
COORBIT_DEFINE_ERROR(DegenerateKilling);
COORBIT_DEFINE_ERROR(DimensionMismatch);
COORBIT_DEFINE_ERROR(ZeroFunctional);
COORBIT_DEFINE_ERROR(SingularGamma);
COORBIT_DEFINE_ERROR(ClusterAmbiguity);
COORBIT_DEFINE_ERROR(SingularS);
COORBIT_DEFINE_ERROR(UnsupportedAlgebra);
COORBIT_DEFINE_ERROR(NotUnitaryForJ);
COORBIT_DEFINE_ERROR(NotSkewForJ);
COORBIT_DEFINE_ERROR(NotComplexLinear);
COORBIT_DEFINE_ERROR(SubspaceNotPreserved);
COORBIT_DEFINE_ERROR(ConfigError);
COORBIT_DEFINE_ERROR(IoError);

#undef COORBIT_DEFINE_ERROR

}  // namespace coorbit
