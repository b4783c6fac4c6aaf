// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "ineube/linalg.hpp"

#include "ineube/common.hpp"

namespace ineube {

Eigen::VectorXcd SolveHermitian(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& b,
                                std::size_t frequency) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw DimensionError("Hermitian solve: shape mismatch");
  if (!a.allFinite() || !b.allFinite())
    throw NumericError("non-finite statistics", frequency);
  if (b.isZero(0.0)) return Eigen::VectorXcd::Zero(b.size());

  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXcd x = llt.solve(b);
    if (x.allFinite()) return x;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(a);
  if (eig.info() != Eigen::Success)
    throw NumericError("Hermitian factorization failed", frequency);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double top = values.cwiseAbs().maxCoeff();
  const double cutoff = top * static_cast<double>(a.rows()) * 1e-14;
  Eigen::VectorXcd proj = eig.eigenvectors().adjoint() * b;
  for (Eigen::Index i = 0; i < proj.size(); ++i)
    proj(i) = values(i) > cutoff ? proj(i) / values(i) : std::complex<double>(0.0);
  Eigen::VectorXcd x = eig.eigenvectors() * proj;
  if (!x.allFinite()) throw NumericError("Hermitian solve produced non-finite weights", frequency);
  return x;
}

}  // namespace ineube
