#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hypercurv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// exprlang

class LexError : public Error {
public:
  LexError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

class UnknownIdentifierError : public ParseError {
public:
  UnknownIdentifierError(const std::string& name, std::size_t position)
      : ParseError("unknown identifier '" + name + "'", position), name_(name) {}
  const std::string& identifier() const noexcept { return name_; }

private:
  std::string name_;
};

/// Evaluation outside a function's domain (ln of non-positive, division by zero, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A derivative was requested where the expression is not smooth (abs at 0, sqrt at 0).
class NonSmoothError : public DomainError {
public:
  using DomainError::DomainError;
};

// geometry

class DegenerateChartError : public Error {
public:
  using Error::Error;
};

class SingularMetricError : public Error {
public:
  using Error::Error;
};

class UmbilicPointError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class VanishingCurvatureError : public Error {
public:
  using Error::Error;
};

class InvalidTupleError : public Error {
public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
public:
  using Error::Error;
};

// catalog / scenes

class CatalogError : public Error {
public:
  using Error::Error;
};

class NoReferenceError : public CatalogError {
public:
  using CatalogError::CatalogError;
};

class SceneError : public Error {
public:
  using Error::Error;
};

}  // namespace hypercurv
