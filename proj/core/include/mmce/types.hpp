#pragma once

#include <Eigen/Dense>
#include <complex>

namespace mmce {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Index = Eigen::Index;

using cplx = std::complex<double>;

}  // namespace mmce
