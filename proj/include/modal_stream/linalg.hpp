#pragma once

#include <Eigen/Dense>
#include <complex>

namespace modal_stream {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace modal_stream
