#pragma once

#include <stdexcept>
#include <string>

namespace graph_deconv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or inconsistent shapes; the CLI maps these to exit code 1.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

/// Two eigenvalues of the shift coincide within the distinctness tolerance.
class DegenerateSpectrum : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

/// A frequency response inside the support is too small to invert.
class NearZeroResponse : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class NonpositiveVariance : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

/// A frequency index has no incident edge in the source graph.
class IsolatedVertex : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

class EmptyComponent : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

/// File could not be opened, read or written; the CLI maps these to exit code 2.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace graph_deconv
