#pragma once

#include <cmath>
#include <stdexcept>

#include "margin/error.hpp"
#include "margin/types.hpp"

namespace margin {

struct SecondMomentMatrix {
  Matrix M;
};

struct EigenDecomposition {
  Vector eigenvalues;   // sorted descending
  Matrix eigenvectors;  // columns aligned with eigenvalues, orthonormal
};

struct SubspaceBasis {
  Matrix B;  // d x dim_v, orthonormal columns
  int dim_v = 0;
};

inline SecondMomentMatrix second_moment(const WeightedDataset& D) {
  if (D.size() == 0) throw std::invalid_argument("second_moment: empty dataset");
  Matrix M = D.X.transpose() * D.p.asDiagonal() * D.X;
  M = ((M + M.transpose()) * 0.5).eval();
  return {std::move(M)};
}

// Full spectrum, descending, with each eigenvector's first coordinate of
// magnitude > 1e-12 made positive so reruns and backends agree bit-wise.
inline EigenDecomposition eigendecompose(const SecondMomentMatrix& S) {
  const Matrix& M = S.M;
  if (M.rows() != M.cols()) throw std::invalid_argument("eigendecompose: non-square");
  double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) throw std::invalid_argument("eigendecompose: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(M);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecompose: solver failed");
  Eigen::Index d = M.rows();
  EigenDecomposition E;
  E.eigenvalues.resize(d);
  E.eigenvectors.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::Index src = d - 1 - i;  // solver returns ascending order
    E.eigenvalues[i] = solver.eigenvalues()[src];
    Vector v = solver.eigenvectors().col(src);
    for (Eigen::Index j = 0; j < d; ++j) {
      if (std::abs(v[j]) > 1e-12) {
        if (v[j] < 0) v = -v;
        break;
      }
    }
    E.eigenvectors.col(i) = v;
  }
  return E;
}

inline SubspaceBasis eigenspace_above(const EigenDecomposition& E, double threshold) {
  if (!(threshold > 0)) throw std::invalid_argument("eigenspace_above: threshold must be > 0");
  Eigen::Index k = 0;
  while (k < E.eigenvalues.size() && E.eigenvalues[k] >= threshold) ++k;
  SubspaceBasis B;
  B.dim_v = static_cast<int>(k);
  B.B = E.eigenvectors.leftCols(k);
  return B;
}

inline SubspaceBasis top_k_eigenspace(const EigenDecomposition& E, int k) {
  if (k < 1 || k > E.eigenvalues.size())
    throw std::invalid_argument("top_k_eigenspace: k out of range");
  SubspaceBasis B;
  B.dim_v = k;
  B.B = E.eigenvectors.leftCols(k);
  return B;
}

inline Vector project(const Vector& v, const SubspaceBasis& B) {
  if (B.dim_v == 0) return Vector::Zero(v.size());
  if (B.B.rows() != v.size()) throw std::invalid_argument("project: dimension mismatch");
  return B.B * (B.B.transpose() * v);
}

// Orthonormal basis of span{vs} by double Gram-Schmidt, dropping residuals
// with norm <= rank_tol.
inline SubspaceBasis gram_schmidt_basis(const std::vector<Vector>& vs, Eigen::Index ambient_dim,
                                        double rank_tol) {
  std::vector<Vector> basis;
  for (const Vector& v : vs) {
    Vector r = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& b : basis) r -= b.dot(r) * b;
    if (r.norm() > rank_tol) basis.push_back(r / r.norm());
  }
  SubspaceBasis B;
  B.dim_v = static_cast<int>(basis.size());
  B.B.resize(ambient_dim, B.dim_v);
  for (int j = 0; j < B.dim_v; ++j) B.B.col(j) = basis[static_cast<size_t>(j)];
  return B;
}

}  // namespace margin
