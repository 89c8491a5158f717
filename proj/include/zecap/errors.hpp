#pragma once

#include <stdexcept>
#include <string>

namespace zecap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotSingleStateError : public Error {
public:
    NotSingleStateError() : Error("channel has more than one state; a DMC view needs exactly one") {}
};

class OverflowError : public Error {
public:
    using Error::Error;
};

class IterationOutOfRangeError : public Error {
public:
    using Error::Error;
};

class AlphabetTooLargeError : public Error {
public:
    using Error::Error;
};

class SearchBudgetExceededError : public Error {
public:
    using Error::Error;
};

class CleanupBudgetExceededError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace zecap
