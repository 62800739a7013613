#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace cpcag {

using Index = std::int64_t;

// Dense storage is column-major real64 throughout.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

using IndexList = std::vector<Index>;

}  // namespace cpcag
