// Copyright 2026 The btl-fisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense symmetric eigen-analysis of Laplacian-type matrices (symmetric PSD
// with the all-ones vector in the null space).

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "btl/model.hpp"

namespace btl {

// Relative threshold below which eigenvalues are treated as null.
inline constexpr double kNullEigenvalueThreshold = 1e-12;
// Absolute asymmetry tolerance accepted by the eigensolver entry points.
inline constexpr double kSymmetryTolerance = 1e-10;

struct SpectralSummary {
  double lambda2 = 0.0;
  double lambda_max = 0.0;
  // Only set when a schedule/Fisher pair was analyzed together.
  std::optional<double> kappa;
};

// Full spectrum in ascending order. Throws ArgumentError for asymmetric
// input and NumericalError if the solver fails.
std::vector<double> eigenvalues(const Eigen::MatrixXd& m);

// Second-smallest eigenvalue.
double algebraic_connectivity(const Eigen::MatrixXd& m);

// lambda2 and lambda_max of m.
SpectralSummary summarize(const Eigen::MatrixXd& m);

// Moore-Penrose pseudo-inverse of a symmetric PSD matrix.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m,
                               double relative_threshold = kNullEigenvalueThreshold);

// Principal square root of a symmetric PSD matrix (null directions kept null).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m,
                         double relative_threshold = kNullEigenvalueThreshold);

// kappa = lambda_max(L^{1/2} I^+ L^{1/2}).
//
// Computed from one eigendecomposition L = U diag(s) U^T: with U_r the range
// basis, kappa = 1 / lambda_min(S^{-1/2} U_r^T I U_r S^{-1/2}). Requires the
// schedule's Laplacian and the Fisher matrix to share their off-diagonal
// support (ArgumentError otherwise).
double kappa(const ComparisonSchedule& schedule, const FisherMatrix& fisher);
double kappa(const Eigen::MatrixXd& laplacian, const Eigen::MatrixXd& fisher);

// Spectral quantities of a (schedule, scores) instance.
struct InstanceSpectrum {
  SpectralSummary laplacian;
  SpectralSummary fisher;
  double kappa = 0.0;
};
InstanceSpectrum instance_spectrum(const ComparisonSchedule& schedule, const ScoreVector& w);

// Analytic spectrum of the normalized Laplacian of the Cayley graph on Z_d with
// difference set {+-1, ..., +-W}, every edge weighted 1 / (d W). Eigenvalue k
// (k = 0..d-1) is (1 / dW) sum_{s in S} (1 - cos(2 pi s k / d)) over the
// distinct residues S of the difference set; for W < d/2 this is
// (2 / dW) sum_{i=1..W} (1 - cos(2 pi i k / d)). Returned in index order k.
std::vector<double> circulant_cayley_spectrum(int d, int width);

// The explicit matrix whose spectrum circulant_cayley_spectrum describes.
Eigen::MatrixXd circulant_cayley_laplacian(int d, int width);

}  // namespace btl
