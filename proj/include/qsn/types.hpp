#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qsn {

using cdouble = std::complex<double>;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Hard cap on the full network dimension. Dense state vectors only; anything
/// larger than this wants a sparse engine, which is out of scope.
inline constexpr Index kDimCap = Index(1) << 16;

/// Off-diagonal magnitudes above this count as coupling in the support graph
/// used by the reduction procedure.
inline constexpr double kSupportTol = 1e-9;

/// A symmetric matrix counts as invertible when its smallest eigenvalue
/// exceeds this fraction of the largest.
inline constexpr double kInvertTolRel = 1e-10;

/// Central finite-difference step for probability derivatives and oracles.
inline constexpr double kFdStep = 1e-5;

/// Invalid configuration or input outside an operation's domain (CLI exit 2).
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested estimation problem has no finite bound: the reduced Fisher
/// matrix is singular, so at least one wanted parameter carries no
/// information (CLI exit 3).
struct EstimationError : std::runtime_error {
  explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

/// Problem size exceeds a hard resource cap (CLI exit 4).
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qsn
