#pragma once

#include <Eigen/Dense>
#include <complex>

namespace blindmimo {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace blindmimo
