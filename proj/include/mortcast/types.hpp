#pragma once

#include <Eigen/Dense>

namespace mortcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Eigen::Index;

} // namespace mortcast
