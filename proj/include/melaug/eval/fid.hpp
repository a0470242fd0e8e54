// Copyright 2026 The melaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cstdio>

#include "melaug/core/error.hpp"

namespace melaug::eval {

// Symmetric PSD square root via eigendecomposition. Mildly negative
// eigenvalues (numerical noise) are clamped to zero; a significantly negative
// spectrum or a visibly asymmetric input is an error.
inline Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m, double sym_tol = 1e-9,
                                       double neg_tol = 1e-8) {
  require(m.rows() == m.cols(), ErrorCode::invalid_argument,
          "matrix_sqrt_psd: square matrix required");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  require((m - m.transpose()).cwiseAbs().maxCoeff() <= sym_tol * scale,
          ErrorCode::invalid_argument, "matrix_sqrt_psd: input not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  require(es.info() == Eigen::Success, ErrorCode::numerical,
          "matrix_sqrt_psd: eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues();
  require(lam.minCoeff() >= -neg_tol * std::max(1.0, lam.maxCoeff()),
          ErrorCode::numerical, "matrix_sqrt_psd: significantly negative spectrum");
  lam = lam.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

struct FidStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // unbiased (n-1) estimator
  Eigen::Index sample_count = 0;
};

// features: (d x n), one example per column.
inline FidStats fid_stats(const Eigen::MatrixXd& features) {
  const Eigen::Index n = features.cols();
  require(n >= 2, ErrorCode::invalid_argument, "fid_stats: need at least 2 samples");
  FidStats s;
  s.sample_count = n;
  s.mean = features.rowwise().mean();
  const Eigen::MatrixXd centered = features.colwise() - s.mean;
  s.covariance = centered * centered.transpose() / static_cast<double>(n - 1);
  return s;
}

// Frechet distance between Gaussian fits. The cross term uses the
// symmetrized product Tr((Sr Sg)^1/2) = Tr((Sr^1/2 Sg Sr^1/2)^1/2), which
// keeps every intermediate symmetric PSD, so no imaginary residue arises.
inline double fid_from_stats(const FidStats& real, const FidStats& gen) {
  require(real.mean.size() == gen.mean.size(), ErrorCode::invalid_argument,
          "fid: feature dimension mismatch");
  const Eigen::MatrixXd a = matrix_sqrt_psd(real.covariance);
  Eigen::MatrixXd inner = a * gen.covariance * a;
  inner = 0.5 * (inner + inner.transpose());
  const double cross = matrix_sqrt_psd(inner).trace();
  const double value = (real.mean - gen.mean).squaredNorm() + real.covariance.trace() +
                       gen.covariance.trace() - 2.0 * cross;
  const double tol =
      1e-8 * std::max(1.0, real.covariance.trace() + gen.covariance.trace());
  require(value >= -tol, ErrorCode::numerical, "fid: negative beyond tolerance");
  return std::max(0.0, value);
}

inline double fid(const Eigen::MatrixXd& real_features,
                  const Eigen::MatrixXd& gen_features) {
  require(real_features.rows() == gen_features.rows(), ErrorCode::invalid_argument,
          "fid: feature dimension mismatch");
  const Eigen::Index d = real_features.rows();
  if (real_features.cols() < d + 1 || gen_features.cols() < d + 1)
    std::fprintf(stderr,
                 "[fid] warning: %lld/%lld samples for %lld-dim features; "
                 "covariance estimates will be noisy\n",
                 static_cast<long long>(real_features.cols()),
                 static_cast<long long>(gen_features.cols()), static_cast<long long>(d));
  return fid_from_stats(fid_stats(real_features), fid_stats(gen_features));
}

}  // namespace melaug::eval
