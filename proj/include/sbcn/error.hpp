#pragma once

#include <stdexcept>
#include <string>

namespace sbcn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SBCN_DEFINE_ERROR(Name)            \
    class Name : public Error {            \
    public:                                \
        using Error::Error;                \
    }

SBCN_DEFINE_ERROR(InvalidGraph);
SBCN_DEFINE_ERROR(InvalidComparison);
SBCN_DEFINE_ERROR(InvalidInput);
SBCN_DEFINE_ERROR(DegenerateVariable);
SBCN_DEFINE_ERROR(ParentLimitExceeded);
SBCN_DEFINE_ERROR(InvalidMove);
SBCN_DEFINE_ERROR(OracleTooLarge);
SBCN_DEFINE_ERROR(ParseError);
SBCN_DEFINE_ERROR(IoError);

#undef SBCN_DEFINE_ERROR

}  // namespace sbcn
