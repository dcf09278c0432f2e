#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace scorebo {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vec<double>;
using MatrixXd = Mat<double>;

/// Raised when the kernel system cannot be factorized even after jitter escalation.
class CholeskyError : public std::runtime_error {
 public:
  explicit CholeskyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace scorebo
