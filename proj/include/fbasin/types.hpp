#pragma once

#include <complex>

#include <Eigen/Dense>

namespace fbasin {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

}  // namespace fbasin
