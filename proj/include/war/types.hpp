#pragma once

#include <Eigen/Dense>

namespace war {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace war
