#pragma once

#include <Eigen/Dense>

namespace tvewd {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace tvewd
