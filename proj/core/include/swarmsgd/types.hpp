#pragma once

#include <Eigen/Core>

namespace swarmsgd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One row per thread; rows are contiguous so a thread's solution is a single span.
using Positions = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace swarmsgd
