#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dbfft {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

/// A field or argument does not satisfy an operation's type contract
/// (wrong domain, wrong layout, mismatched grids).
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConjugateSymmetryError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// det F <= 0 at some voxel.
class InvertedElement : public Error {
 public:
  InvertedElement(std::size_t voxel, double det)
      : Error("inverted element at voxel " + std::to_string(voxel) +
              " (det F = " + std::to_string(det) + ")"),
        voxel_(voxel) {}
  std::size_t voxel() const noexcept { return voxel_; }

 private:
  std::size_t voxel_;
};

class PreconditionerError : public Error {
 public:
  using Error::Error;
};

class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent file contents (DBFM, VTK).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration; the message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dbfft
