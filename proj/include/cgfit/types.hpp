#pragma once

#include <Eigen/Dense>

namespace cgfit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace cgfit
