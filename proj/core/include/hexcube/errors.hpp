#pragma once

#include <stdexcept>
#include <string>

namespace hexcube {

// Error classes map to CLI exit codes:
//   Input    -> 2 (parse / topology / configuration)
//   Solver   -> 3 (linear solves, numerical degeneracy)
//   Flow     -> 4 (evolution, inversion, overlap, bijectivity)
//   Io       -> 5 (filesystem)
enum class ErrorClass { Input = 2, Solver = 3, Flow = 4, Io = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const { return cls_; }

private:
    ErrorClass cls_;
};

#define HEXCUBE_DEFINE_ERROR(Name, Class)                                   \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(Class, #Name ": " + what) {} \
    }

HEXCUBE_DEFINE_ERROR(ParseError, ErrorClass::Input);
HEXCUBE_DEFINE_ERROR(TopologyError, ErrorClass::Input);
HEXCUBE_DEFINE_ERROR(DegenerateGeometry, ErrorClass::Input);
HEXCUBE_DEFINE_ERROR(ResolutionTooHigh, ErrorClass::Input);
HEXCUBE_DEFINE_ERROR(NonWatertight, ErrorClass::Input);
HEXCUBE_DEFINE_ERROR(EmptyVolume, ErrorClass::Input);
HEXCUBE_DEFINE_ERROR(ConfigError, ErrorClass::Input);
HEXCUBE_DEFINE_ERROR(ZeroMeanVolume, ErrorClass::Input);

HEXCUBE_DEFINE_ERROR(SolverFailure, ErrorClass::Solver);
HEXCUBE_DEFINE_ERROR(NumericalDegeneracy, ErrorClass::Solver);
HEXCUBE_DEFINE_ERROR(IncompatibleRHS, ErrorClass::Solver);

HEXCUBE_DEFINE_ERROR(NoConvergence, ErrorClass::Flow);
HEXCUBE_DEFINE_ERROR(EmptyInterface, ErrorClass::Flow);
HEXCUBE_DEFINE_ERROR(OverlapError, ErrorClass::Flow);
HEXCUBE_DEFINE_ERROR(DegenerateImage, ErrorClass::Flow);
HEXCUBE_DEFINE_ERROR(FlipDetected, ErrorClass::Flow);
HEXCUBE_DEFINE_ERROR(LocationFailure, ErrorClass::Flow);
HEXCUBE_DEFINE_ERROR(ShellCountMismatch, ErrorClass::Flow);
HEXCUBE_DEFINE_ERROR(BijectivityFailure, ErrorClass::Flow);
HEXCUBE_DEFINE_ERROR(InvertedCell, ErrorClass::Flow);
HEXCUBE_DEFINE_ERROR(InversionFailure, ErrorClass::Flow);

HEXCUBE_DEFINE_ERROR(IoError, ErrorClass::Io);

#undef HEXCUBE_DEFINE_ERROR

}  // namespace hexcube
