// Shared aliases and the error taxonomy used across the library.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncchern {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using IVec = std::vector<int>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct Error : std::runtime_error {
  std::string kind;
  Error(std::string k, const std::string& msg)
      : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& m) : Error("dimension", m) {}
};
struct GeometryError : Error {
  explicit GeometryError(const std::string& m) : Error("geometry", m) {}
};
struct FluxError : Error {
  explicit FluxError(const std::string& m) : Error("flux", m) {}
};
struct GapError : Error {
  explicit GapError(const std::string& m) : Error("gap", m) {}
};
struct LookupError : Error {
  explicit LookupError(const std::string& m) : Error("lookup", m) {}
};
struct PrecisionError : Error {
  explicit PrecisionError(const std::string& m) : Error("precision", m) {}
};
struct ResourceError : Error {
  explicit ResourceError(const std::string& m) : Error("resource", m) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("config", m) {}
};
struct SchemeError : Error {
  explicit SchemeError(const std::string& m) : Error("scheme", m) {}
};

}  // namespace ncchern
