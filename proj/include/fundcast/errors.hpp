#pragma once

#include <stdexcept>
#include <string>

namespace fundcast {

// Error taxonomy. Each maps to one failure class named in the module
// contracts; all derive from Error so callers can catch broadly.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define FUNDCAST_ERROR(NAME)                                        \
    struct NAME : Error {                                           \
        explicit NAME(const std::string& msg) : Error(msg) {}       \
    }

FUNDCAST_ERROR(MissingOutcome);
FUNDCAST_ERROR(ParseError);
FUNDCAST_ERROR(SchemaError);
FUNDCAST_ERROR(SplitError);
FUNDCAST_ERROR(GeneratorError);
FUNDCAST_ERROR(UnknownCategory);
FUNDCAST_ERROR(FitError);
FUNDCAST_ERROR(EncodeError);
FUNDCAST_ERROR(EmbedError);
FUNDCAST_ERROR(ParamError);
FUNDCAST_ERROR(SingularError);
FUNDCAST_ERROR(ConvergenceError);
FUNDCAST_ERROR(ShapeError);
FUNDCAST_ERROR(StateError);
FUNDCAST_ERROR(MetricError);
FUNDCAST_ERROR(SampleError);
FUNDCAST_ERROR(AblationError);
FUNDCAST_ERROR(RangeError);

#undef FUNDCAST_ERROR

}  // namespace fundcast
