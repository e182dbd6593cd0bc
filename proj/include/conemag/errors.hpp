#pragma once

#include <stdexcept>
#include <string>

namespace conemag {

// Base error; exit_code() is the CLI status for this failure class.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const { return 2; }
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

class WindowTooSmallError : public Error {
public:
    using Error::Error;
};

class GammaOutOfRangeError : public Error {
public:
    using Error::Error;
};

class SingularTimeError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 3; }
};

class NonconvergenceError : public Error {
public:
    using Error::Error;
    int exit_code() const override { return 4; }
};

}  // namespace conemag
