#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace obp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

} // namespace obp
