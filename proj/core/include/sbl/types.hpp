#pragma once

#include <Eigen/Dense>

namespace sbl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

}  // namespace sbl
