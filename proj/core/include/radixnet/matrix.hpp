#pragma once

#include <Eigen/Core>

namespace radixnet {

// Row-major everywhere so batches are contiguous per sample and the
// on-disk layout (row-major f64) matches memory byte for byte.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

}  // namespace radixnet
