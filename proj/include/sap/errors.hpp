#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sap {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Violated precondition or unusable parameter combination.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// File-system and parsing failures.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// A numerical routine could not produce a valid result.
class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what) : Error(what) {}
};

// Every candidate secant was dropped during construction.
class EmptySecantSet : public NumericalFailure {
 public:
  explicit EmptySecantSet(const std::string& what) : NumericalFailure(what) {}
};

// Gram-Schmidt hit a (near-)dependent vector. `position` is 1-based.
class RankDeficiency : public NumericalFailure {
 public:
  RankDeficiency(std::size_t position, const std::string& what)
      : NumericalFailure(what), position(position) {}
  std::size_t position;
};

// Secant storage would exceed the configured memory budget.
class MemoryBudgetExceeded : public NumericalFailure {
 public:
  explicit MemoryBudgetExceeded(const std::string& what) : NumericalFailure(what) {}
};

}  // namespace sap
