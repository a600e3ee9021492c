#include "sap/synth.hpp"

#include <Eigen/QR>
#include <cmath>
#include <numbers>

#include "sap/errors.hpp"
#include "sap/rng.hpp"

namespace sap::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Stream index used to derive the embedding seed from the generator seed.
constexpr std::uint64_t kEmbedStream = 1;

void require_count(Index count) {
  if (count < 2) throw InvalidArgument("generator needs count >= 2");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

Eigen::Matrix<double, 10, 1> trig_moment_point(double t) {
  Eigen::Matrix<double, 10, 1> x;
  for (int k = 1; k <= 5; ++k) {
    x(2 * (k - 1)) = std::cos(k * t);
    x(2 * (k - 1) + 1) = std::sin(k * t);
  }
  return x;
}

Eigen::Vector3d curve3d_point(double t) {
  return {std::cos(t), std::sin(t), std::cos(2.0 * t)};
}

Eigen::Vector3d torus_point(double theta, double phi, double big_radius, double small_radius) {
  const double ring = big_radius + small_radius * std::cos(phi);
  return {ring * std::cos(theta), ring * std::sin(theta), small_radius * std::sin(phi)};
}

DataSet trig_moment_curve(Index count, std::uint64_t seed) {
  require_count(count);
  RandomStream rng(seed);
  DataSet data;
  data.points.resize(count, 10);
  for (Index i = 0; i < count; ++i) {
    data.points.row(i) = trig_moment_point(rng.uniform(0.0, kTwoPi)).transpose();
  }
  data.set_meta("generator", "trig-moment");
  data.set_meta("count", std::to_string(count));
  data.set_meta("seed", std::to_string(seed));
  return data;
}

DataSet curve_3d_raw(Index count, std::uint64_t seed) {
  require_count(count);
  RandomStream rng(seed);
  DataSet data;
  data.points.resize(count, 3);
  for (Index i = 0; i < count; ++i) {
    data.points.row(i) = curve3d_point(rng.uniform(0.0, kTwoPi)).transpose();
  }
  data.set_meta("generator", "curve3d");
  data.set_meta("count", std::to_string(count));
  data.set_meta("seed", std::to_string(seed));
  return data;
}

DataSet torus_raw(Index count, std::uint64_t seed, double big_radius, double small_radius) {
  require_count(count);
  if (!(big_radius > small_radius) || !(small_radius > 0.0)) {
    throw InvalidArgument("torus needs R > r > 0");
  }
  RandomStream rng(seed);
  DataSet data;
  data.points.resize(count, 3);
  for (Index i = 0; i < count; ++i) {
    const double theta = rng.uniform(0.0, kTwoPi);
    const double phi = rng.uniform(0.0, kTwoPi);
    data.points.row(i) = torus_point(theta, phi, big_radius, small_radius).transpose();
  }
  data.set_meta("generator", "torus");
  data.set_meta("count", std::to_string(count));
  data.set_meta("seed", std::to_string(seed));
  data.set_meta("R", fmt(big_radius));
  data.set_meta("r", fmt(small_radius));
  return data;
}

DataSet sphere3_raw(Index count, std::uint64_t seed) {
  require_count(count);
  RandomStream rng(seed);
  DataSet data;
  data.points.resize(count, 4);
  for (Index i = 0; i < count; ++i) {
    Eigen::Vector4d x;
    double norm;
    do {
      for (int c = 0; c < 4; ++c) x(c) = rng.gaussian();
      norm = x.norm();
    } while (norm < 1e-12);
    data.points.row(i) = (x / norm).transpose();
  }
  data.set_meta("generator", "sphere3");
  data.set_meta("count", std::to_string(count));
  data.set_meta("seed", std::to_string(seed));
  return data;
}

DataSet curve_3d(Index count, std::uint64_t seed, Index target_dim) {
  if (target_dim < 3) throw InvalidArgument("curve3d needs target_dim >= 3");
  return embed_isometric(curve_3d_raw(count, seed), target_dim, derive_seed(seed, kEmbedStream));
}

DataSet torus(Index count, std::uint64_t seed, double big_radius, double small_radius,
              Index target_dim) {
  if (target_dim < 3) throw InvalidArgument("torus needs target_dim >= 3");
  return embed_isometric(torus_raw(count, seed, big_radius, small_radius), target_dim,
                         derive_seed(seed, kEmbedStream));
}

DataSet sphere3(Index count, std::uint64_t seed, Index target_dim) {
  if (target_dim < 4) throw InvalidArgument("sphere3 needs target_dim >= 4");
  return embed_isometric(sphere3_raw(count, seed), target_dim, derive_seed(seed, kEmbedStream));
}

Matrix random_orthogonal(Index dim, std::uint64_t seed) {
  if (dim < 1) throw InvalidArgument("random_orthogonal needs dim >= 1");
  RandomStream rng(seed);
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    for (Index i = 0; i < dim; ++i) g(i, j) = rng.gaussian();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

DataSet embed_isometric(const DataSet& data, Index target_dim, std::uint64_t seed) {
  if (target_dim < data.dim()) {
    throw InvalidArgument("embed_isometric needs target_dim >= source dimension");
  }
  const Matrix q = random_orthogonal(target_dim, seed);
  DataSet out;
  out.meta = data.meta;
  Matrix padded = Matrix::Zero(data.count(), target_dim);
  padded.leftCols(data.dim()) = data.points;
  out.points = padded * q.transpose();  // rows map as x -> Qx
  out.set_meta("embedded_dim", std::to_string(target_dim));
  out.set_meta("embed_seed", std::to_string(seed));
  return out;
}

DataSet add_gaussian_noise(const DataSet& data, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw InvalidArgument("noise sigma must be >= 0");
  DataSet out;
  out.meta = data.meta;
  out.points = data.points;
  if (sigma > 0.0) {
    RandomStream rng(seed);
    for (Index i = 0; i < out.points.rows(); ++i) {
      for (Index j = 0; j < out.points.cols(); ++j) out.points(i, j) += sigma * rng.gaussian();
    }
  }
  out.set_meta("noise_sigma", fmt(sigma));
  out.set_meta("noise_seed", std::to_string(seed));
  return out;
}

}  // namespace sap::synth
