#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ammfg {

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// A trade or aggregate flow would empty (or overdraw) a pool reserve.
class ReserveDepletionError : public Error
{
  public:
    using Error::Error;
};

/// Control bounds or mean paths that break the reserve floor X_t >= eps0.
class AdmissibilityError : public Error
{
  public:
    static constexpr std::size_t no_node = static_cast<std::size_t>(-1);

    explicit AdmissibilityError(std::string const& what,
                                std::size_t node = no_node)
        : Error(what), node_(node)
    {
    }

    std::size_t node() const { return node_; }

  private:
    std::size_t node_;
};

class NumericalFailure : public Error
{
  public:
    using Error::Error;
};

/// Caller misuse: mismatched grids, missing inputs, bad flags.
class UsageError : public Error
{
  public:
    using Error::Error;
};

}  // namespace ammfg
