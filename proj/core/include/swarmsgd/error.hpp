#pragma once

#include <stdexcept>
#include <string>

namespace swarmsgd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad sizes, dimension mismatches and out-of-domain scalars.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Random graph generation gave up before drawing a connected graph.
class ConnectivityError : public Error {
 public:
  using Error::Error;
};

/// A graph that must be connected is not.
class DisconnectedGraph : public ConnectivityError {
 public:
  DisconnectedGraph(const std::string& what, double lambda2) : ConnectivityError(what), lambda2_(lambda2) {}
  double lambda2() const noexcept { return lambda2_; }

 private:
  double lambda2_;
};

/// Parameters fall outside the regime in which a convergence bound applies.
class InadmissibleParameters : public Error {
 public:
  using Error::Error;
};

/// Configuration document is malformed; `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace swarmsgd
