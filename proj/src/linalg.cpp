#include "sap/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "sap/errors.hpp"
#include "sap/parallel.hpp"

namespace sap::linalg {

namespace {

constexpr Index kGramBlock = 4096;
constexpr int kGramSlots = 64;
constexpr double kZeroFactor = 1e-10;  // sigma below this (relative) is treated as exact zero

// Accumulates `nblocks` partial products into 64 slots (slot s owns blocks
// b == s mod 64, summed in increasing b), then combines slots in index
// order. The summation order is a function of the problem size only, so the
// result never depends on how many workers ran.
Matrix accumulate_gram(Index dim, std::int64_t nblocks,
                       const std::function<Matrix(std::int64_t)>& block_product) {
  std::vector<Matrix> slots(kGramSlots, Matrix::Zero(dim, dim));
  parallel_blocks(kGramSlots, 1, [&](std::int64_t, std::int64_t s, std::int64_t) {
    for (std::int64_t b = s; b < nblocks; b += kGramSlots) {
      slots[static_cast<std::size_t>(s)] += block_product(b);
    }
  });
  Matrix gram = Matrix::Zero(dim, dim);
  for (int s = 0; s < kGramSlots; ++s) gram += slots[static_cast<std::size_t>(s)];
  return gram;
}

void check_input(const Matrix& a, const char* op) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw InvalidArgument(std::string(op) + ": matrix must be non-empty");
  }
  if (!a.allFinite()) {
    throw InvalidArgument(std::string(op) + ": matrix contains non-finite entries");
  }
}

// Eigensolve of a symmetric PSD matrix, returned as (vectors, values) with
// values sorted non-increasing and clamped at zero.
std::pair<Matrix, Vector> psd_eigs(const Matrix& gram, const char* op) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure(std::string(op) + ": symmetric eigensolver failed to converge on a " +
                           std::to_string(gram.rows()) + "x" + std::to_string(gram.cols()) +
                           " Gram matrix");
  }
  const Index q = gram.rows();
  Matrix vectors(q, q);
  Vector values(q);
  for (Index i = 0; i < q; ++i) {
    vectors.col(i) = solver.eigenvectors().col(q - 1 - i);
    values[i] = std::sqrt(std::max(solver.eigenvalues()[q - 1 - i], 0.0));
  }
  return {std::move(vectors), std::move(values)};
}

// Replaces column i of `basis` by the unit residual of the standard basis
// vector least represented by columns 0..i-1 (largest residual, smallest
// index on ties).
void complete_column(Matrix& basis, Index i) {
  const Index dim = basis.rows();
  Index best = 0;
  double best_norm2 = -1.0;
  for (Index j = 0; j < dim; ++j) {
    double norm2 = 1.0;
    for (Index k = 0; k < i; ++k) {
      const double c = basis(j, k);
      norm2 -= c * c;
    }
    if (norm2 > best_norm2) {
      best_norm2 = norm2;
      best = j;
    }
  }
  Vector w = Vector::Unit(dim, best);
  for (Index k = 0; k < i; ++k) w -= basis.col(k).dot(w) * basis.col(k);
  basis.col(i) = w / w.norm();
}

// In-place cleanup of a derived singular-vector factor: orthonormalize the
// columns in order, and once a column's content drops to the zero threshold
// replace it (and all later ones) by deterministic completions with
// sigma := 0. Keeps sigma non-increasing.
void repair_factor(Matrix& factor, Vector& sigma) {
  const double zero_tol = kZeroFactor * sigma[0];
  bool zero_tail = false;
  for (Index i = 0; i < factor.cols(); ++i) {
    if (!zero_tail && factor.col(i).norm() > zero_tol) {
      Vector w = factor.col(i);
      for (Index k = 0; k < i; ++k) w -= factor.col(k).dot(w) * factor.col(k);
      const double r = w.norm();
      if (r > zero_tol) {
        factor.col(i) = w / r;
        continue;
      }
    }
    zero_tail = true;
    sigma[i] = 0.0;
    complete_column(factor, i);
  }
}

// Canonical signs: largest-magnitude entry of each u column positive,
// smallest index winning ties; v flips with u so the product is unchanged.
void fix_signs(Matrix& u, Matrix* v) {
  for (Index i = 0; i < u.cols(); ++i) {
    Index arg = 0;
    double best = -1.0;
    for (Index j = 0; j < u.rows(); ++j) {
      const double mag = std::abs(u(j, i));
      if (mag > best) {
        best = mag;
        arg = j;
      }
    }
    if (u(arg, i) < 0.0) {
      u.col(i) = -u.col(i);
      if (v) v->col(i) = -v->col(i);
    }
  }
}

}  // namespace

Matrix gram_of_rows(const Matrix& a) {
  const std::int64_t nblocks = block_count(a.cols(), kGramBlock);
  return accumulate_gram(a.rows(), nblocks, [&](std::int64_t b) -> Matrix {
    const Index begin = static_cast<Index>(b) * kGramBlock;
    const Index len = std::min<Index>(kGramBlock, a.cols() - begin);
    const auto block = a.middleCols(begin, len);
    return block * block.transpose();
  });
}

Matrix gram_of_columns(const Matrix& a) {
  const std::int64_t nblocks = block_count(a.rows(), kGramBlock);
  return accumulate_gram(a.cols(), nblocks, [&](std::int64_t b) -> Matrix {
    const Index begin = static_cast<Index>(b) * kGramBlock;
    const Index len = std::min<Index>(kGramBlock, a.rows() - begin);
    const auto block = a.middleRows(begin, len);
    return block.transpose() * block;
  });
}

SvdFactors thin_svd(const Matrix& a) {
  check_input(a, "thin_svd");
  const Index n = a.rows();
  const Index p = a.cols();
  SvdFactors out;
  if (n <= p) {
    auto [u, sigma] = psd_eigs(gram_of_rows(a), "thin_svd");
    out.u = std::move(u);
    out.sigma = std::move(sigma);
    out.v.resize(p, n);
    for (Index i = 0; i < n; ++i) out.v.col(i) = a.transpose() * out.u.col(i);
    repair_factor(out.v, out.sigma);
  } else {
    auto [v, sigma] = psd_eigs(gram_of_columns(a), "thin_svd");
    out.v = std::move(v);
    out.sigma = std::move(sigma);
    out.u.resize(n, p);
    for (Index i = 0; i < p; ++i) out.u.col(i) = a * out.v.col(i);
    repair_factor(out.u, out.sigma);
  }
  fix_signs(out.u, &out.v);
  return out;
}

LeftSpectrum left_spectrum(const Matrix& a) {
  check_input(a, "left_spectrum");
  const Index q = std::min(a.rows(), a.cols());
  auto [u, sigma] = psd_eigs(gram_of_rows(a), "left_spectrum");
  LeftSpectrum out;
  out.u = u.leftCols(q);
  out.sigma = sigma.head(q);
  fix_signs(out.u, nullptr);
  return out;
}

Matrix modified_gram_schmidt(const Matrix& vectors, double tolerance) {
  check_input(vectors, "modified_gram_schmidt");
  Matrix q = vectors;
  for (Index c = 0; c < q.cols(); ++c) {
    for (Index k = 0; k < c; ++k) q.col(c) -= q.col(k).dot(q.col(c)) * q.col(k);
    const double residual = q.col(c).norm();
    if (residual < tolerance) {
      throw RankDeficiency(
          static_cast<std::size_t>(c + 1),
          "modified_gram_schmidt: input column " + std::to_string(c + 1) +
              " is linearly dependent on earlier columns (residual " + std::to_string(residual) +
              ")");
    }
    q.col(c) /= residual;
  }
  return q;
}

}  // namespace sap::linalg
