// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace irsmimo {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

// Raised when a formula leaves its validity region (log of a non-positive
// argument, indefinite variance, ill-conditioned eigen-solve and so on).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an iterative routine exhausts its iteration budget.
class NonConvergence : public std::runtime_error {
 public:
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

inline double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

inline double dbm_to_mw(double x_dbm) { return std::pow(10.0, x_dbm / 10.0); }

constexpr double kNatsPerBit = 0.69314718055994530942;

}  // namespace irsmimo
