#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace eqs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Vacuum permittivity in F/m.
inline constexpr double vacuum_permittivity = 8.8541878128e-12;

}  // namespace eqs
