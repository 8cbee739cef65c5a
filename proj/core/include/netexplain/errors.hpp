#pragma once

#include <stdexcept>
#include <string>

namespace netexplain {

// Root of every exception thrown by the library. Derived types name the
// failure category so callers (the CLI in particular) can map them to exit
// codes without string matching.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define NETEXPLAIN_DEFINE_ERROR(Name)                          \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string& what) : Error(what) {}    \
  }

// NPY container
NETEXPLAIN_DEFINE_ERROR(FormatError);
NETEXPLAIN_DEFINE_ERROR(UnsupportedLayout);
NETEXPLAIN_DEFINE_ERROR(UnsupportedDtype);
NETEXPLAIN_DEFINE_ERROR(TruncatedFile);
NETEXPLAIN_DEFINE_ERROR(RangeError);

// Manifests and record files
NETEXPLAIN_DEFINE_ERROR(DuplicateId);
NETEXPLAIN_DEFINE_ERROR(SchemaError);

// Numeric contracts
NETEXPLAIN_DEFINE_ERROR(ValueError);
NETEXPLAIN_DEFINE_ERROR(ShapeError);
NETEXPLAIN_DEFINE_ERROR(DomainError);
NETEXPLAIN_DEFINE_ERROR(EmptyDataset);
NETEXPLAIN_DEFINE_ERROR(IndexError);

// Lookup
NETEXPLAIN_DEFINE_ERROR(UnknownClass);

// Filesystem / sinks
NETEXPLAIN_DEFINE_ERROR(IoError);

// Artifacts built under different parameters (gamma, channels, ...)
NETEXPLAIN_DEFINE_ERROR(IncompatibleArtifacts);

#undef NETEXPLAIN_DEFINE_ERROR

}  // namespace netexplain
