#pragma once

#include "sap/dataset.hpp"

namespace sap::linalg {

// Thin SVD a = u * sigma.asDiagonal() * v^T with q = min(rows, cols) columns.
// u and v have orthonormal columns; sigma is non-negative and non-increasing.
struct SvdFactors {
  Matrix u;
  Vector sigma;
  Matrix v;
};

// Left factor only: u (rows x q) and sigma (q), q = min(rows, cols).
// Never materializes the right factor, so it is safe for very wide matrices.
struct LeftSpectrum {
  Matrix u;
  Vector sigma;
};

// a^T * a and a * a^T with a fixed blockwise accumulation order, so the
// result is byte-identical regardless of the worker count.
Matrix gram_of_columns(const Matrix& a);
Matrix gram_of_rows(const Matrix& a);

// Computed via a symmetric eigensolve of the smaller Gram matrix; the other
// factor is derived, re-orthonormalized, and deterministically completed
// where singular values vanish. Column signs are canonical: the
// largest-magnitude entry of each u column is made positive (smallest index
// wins ties).
//
// Throws InvalidArgument for empty or non-finite input, NumericalFailure if
// the eigensolver does not converge.
SvdFactors thin_svd(const Matrix& a);

LeftSpectrum left_spectrum(const Matrix& a);

// Orthonormalizes the columns of `vectors` in order; the first output column
// is the normalization of the first input column. Throws RankDeficiency
// (with 1-based position) when a residual norm falls below `tolerance`.
Matrix modified_gram_schmidt(const Matrix& vectors, double tolerance = 1e-10);

}  // namespace sap::linalg
