#pragma once

#include <cstdint>

#include "sap/dataset.hpp"

namespace sap::synth {

// Point maps, exposed so tests can evaluate the manifolds directly.
Eigen::Matrix<double, 10, 1> trig_moment_point(double t);
Eigen::Vector3d curve3d_point(double t);
Eigen::Vector3d torus_point(double theta, double phi, double big_radius, double small_radius);

// Samples of the trigonometric moment curve
// (cos t, sin t, cos 2t, sin 2t, ..., cos 5t, sin 5t) in R^10,
// with t i.i.d. uniform on [0, 2pi).
DataSet trig_moment_curve(Index count, std::uint64_t seed);

// Pre-embedding samplers in the manifolds' native ambient spaces.
DataSet curve_3d_raw(Index count, std::uint64_t seed);
DataSet torus_raw(Index count, std::uint64_t seed, double big_radius = 2.0,
                  double small_radius = 1.0);
DataSet sphere3_raw(Index count, std::uint64_t seed);

// The same samplers followed by embed_isometric into target_dim. The
// embedding seed is derived from `seed` so one seed fixes the whole dataset.
DataSet curve_3d(Index count, std::uint64_t seed, Index target_dim = 15);
DataSet torus(Index count, std::uint64_t seed, double big_radius = 2.0,
              double small_radius = 1.0, Index target_dim = 15);
DataSet sphere3(Index count, std::uint64_t seed, Index target_dim = 15);

// Uniformly random orthogonal matrix: QR of a Gaussian matrix with the signs
// of R's diagonal absorbed into Q so the factorization is unique.
Matrix random_orthogonal(Index dim, std::uint64_t seed);

// Zero-pads points to target_dim and applies a seeded random orthogonal map.
// A linear isometry: all pairwise distances are preserved to round-off.
DataSet embed_isometric(const DataSet& data, Index target_dim, std::uint64_t seed);

// Adds i.i.d. N(0, sigma^2) to every entry.
DataSet add_gaussian_noise(const DataSet& data, double sigma, std::uint64_t seed);

}  // namespace sap::synth
