// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INEUBE_LINALG_HPP_
#define INEUBE_LINALG_HPP_

#include <cstddef>

#include <Eigen/Dense>

namespace ineube {

// Solves A x = b for Hermitian positive semi-definite A. Uses a Cholesky
// factorization, falling back to an eigenvalue-clipped pseudo-inverse when A
// is numerically singular. Throws NumericError tagged with `frequency` when
// A or b is not finite or the fallback produces a non-finite solution.
Eigen::VectorXcd SolveHermitian(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b,
                                std::size_t frequency);

}  // namespace ineube

#endif  // INEUBE_LINALG_HPP_
