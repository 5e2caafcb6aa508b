#pragma once

#include <stdexcept>
#include <string>

namespace geosep {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Empty images, mismatched sizes, filters larger than the grid.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A parameter outside its documented domain (negative threshold, bad weights...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The filter bank does not cover some frequency bin well enough to be inverted.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

/// NaN/Inf produced during an iterative computation.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A quality measure evaluated against an empty ground truth.
class UndefinedMeasureError : public Error {
public:
    using Error::Error;
};

class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

class CorruptFileError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration (unknown key, unparsable value).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace geosep
