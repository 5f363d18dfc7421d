#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hocal {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  CapExceeded,
  Domain,
  Parse,
  EmptyInput,
  KeyMismatch,
  OffLattice,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every module reports failures through this exception; `kind()` is what the
/// CLI serializes into its single-line JSON diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hocal
