#pragma once

#include <stdexcept>
#include <string>

namespace gtr {

// Base class for precondition and validation failures. The CLI maps these to
// exit code 2; anything else escaping a command is an internal error (exit 1).
// what() always starts with the error name so diagnostics are greppable.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

    const std::string& name() const { return name_; }

private:
    std::string name_;
};

#define GTR_DEFINE_ERROR(NAME)                                           \
    class NAME : public Error {                                          \
    public:                                                              \
        explicit NAME(const std::string& message) : Error(#NAME, message) {} \
    }

GTR_DEFINE_ERROR(InvalidArgument);
GTR_DEFINE_ERROR(InvalidStageCount);
GTR_DEFINE_ERROR(EmptyStage);
GTR_DEFINE_ERROR(EmptySet);
GTR_DEFINE_ERROR(IndexOutOfRange);
GTR_DEFINE_ERROR(MissingScore);
GTR_DEFINE_ERROR(InvalidBeta);
GTR_DEFINE_ERROR(NotPositiveDefinite);
GTR_DEFINE_ERROR(OverlappingSets);
GTR_DEFINE_ERROR(ParseError);

#undef GTR_DEFINE_ERROR

}  // namespace gtr
