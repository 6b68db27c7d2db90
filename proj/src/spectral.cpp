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

#include "btl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "btl/error.hpp"

namespace btl {
namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* where) {
  if (m.rows() != m.cols()) {
    throw ArgumentError(std::string(where) + ": matrix is not square");
  }
  const double asymmetry = m.rows() == 0 ? 0.0 : (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asymmetry <= kSymmetryTolerance)) {
    throw ArgumentError(std::string(where) + ": matrix is not symmetric (max |m - m^T| = " +
                        std::to_string(asymmetry) + ")");
  }
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(const Eigen::MatrixXd& m,
                                                         const char* where) {
  check_symmetric(m, where);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericalError(std::string(where) + ": eigensolver did not converge for a " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.rows()) +
                         " matrix (max |entry| = " + std::to_string(m.cwiseAbs().maxCoeff()) +
                         ")");
  }
  return solver;
}

double null_cutoff(const Eigen::VectorXd& values, double relative_threshold) {
  return relative_threshold * std::max(values.cwiseAbs().maxCoeff(), 0.0);
}

}  // namespace

std::vector<double> eigenvalues(const Eigen::MatrixXd& m) {
  const auto solver = decompose(m, "eigenvalues");
  const Eigen::VectorXd& values = solver.eigenvalues();
  return {values.data(), values.data() + values.size()};
}

double algebraic_connectivity(const Eigen::MatrixXd& m) {
  if (m.rows() < 2) throw ArgumentError("algebraic_connectivity: need at least 2 rows");
  return eigenvalues(m)[1];
}

SpectralSummary summarize(const Eigen::MatrixXd& m) {
  if (m.rows() < 2) throw ArgumentError("summarize: need at least 2 rows");
  const auto values = eigenvalues(m);
  return {values[1], values.back(), std::nullopt};
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double relative_threshold) {
  const auto solver = decompose(m, "pseudo_inverse");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const double cutoff = null_cutoff(values, relative_threshold);
  Eigen::VectorXd inverted = Eigen::VectorXd::Zero(values.size());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values[k] > cutoff) inverted[k] = 1.0 / values[k];
  }
  const Eigen::MatrixXd& u = solver.eigenvectors();
  return u * inverted.asDiagonal() * u.transpose();
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, double relative_threshold) {
  const auto solver = decompose(m, "psd_sqrt");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const double cutoff = null_cutoff(values, relative_threshold);
  Eigen::VectorXd root = Eigen::VectorXd::Zero(values.size());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (values[k] > cutoff) root[k] = std::sqrt(values[k]);
  }
  const Eigen::MatrixXd& u = solver.eigenvectors();
  return u * root.asDiagonal() * u.transpose();
}

double kappa(const Eigen::MatrixXd& laplacian, const Eigen::MatrixXd& fisher) {
  if (laplacian.rows() != fisher.rows() || laplacian.cols() != fisher.cols()) {
    throw ArgumentError("kappa: Laplacian and Fisher matrix differ in dimension");
  }
  const Eigen::Index d = laplacian.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j && ((laplacian(i, j) != 0.0) != (fisher(i, j) != 0.0))) {
        throw ArgumentError("kappa: Laplacian and Fisher matrix have different edge support at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  check_symmetric(fisher, "kappa");

  const auto solver = decompose(laplacian, "kappa");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const double cutoff = null_cutoff(values, kNullEigenvalueThreshold);
  std::vector<Eigen::Index> range;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (values[k] > cutoff) range.push_back(k);
  }
  if (range.empty()) throw NumericalError("kappa: Laplacian has empty range");

  const auto r = static_cast<Eigen::Index>(range.size());
  Eigen::MatrixXd basis(d, r);
  for (Eigen::Index c = 0; c < r; ++c) {
    basis.col(c) = solver.eigenvectors().col(range[c]) / std::sqrt(values[range[c]]);
  }
  Eigen::MatrixXd whitened = basis.transpose() * fisher * basis;
  whitened = 0.5 * (whitened + whitened.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> inner(whitened, Eigen::EigenvaluesOnly);
  if (inner.info() != Eigen::Success) throw NumericalError("kappa: inner eigensolver failed");
  const double smallest = inner.eigenvalues()[0];
  if (!(smallest > 0.0)) {
    throw NumericalError("kappa: Fisher matrix is singular on the range of the Laplacian");
  }
  return 1.0 / smallest;
}

double kappa(const ComparisonSchedule& schedule, const FisherMatrix& fisher) {
  if (fisher.dimension() != schedule.dimension()) {
    throw ArgumentError("kappa: schedule and Fisher matrix differ in dimension");
  }
  return kappa(schedule.laplacian(), fisher.matrix());
}

InstanceSpectrum instance_spectrum(const ComparisonSchedule& schedule, const ScoreVector& w) {
  const Eigen::MatrixXd laplacian = schedule.laplacian();
  const FisherMatrix fisher = fisher_information(w, schedule);
  InstanceSpectrum spectrum;
  spectrum.laplacian = summarize(laplacian);
  spectrum.fisher = summarize(fisher.matrix());
  spectrum.kappa = kappa(laplacian, fisher.matrix());
  spectrum.fisher.kappa = spectrum.kappa;
  return spectrum;
}

std::vector<double> circulant_cayley_spectrum(int d, int width) {
  if (d < 2) throw ArgumentError("circulant_cayley_spectrum: d must be >= 2");
  if (width < 1 || width > d - 1) {
    throw ArgumentError("circulant_cayley_spectrum: width must lie in [1, d-1]");
  }
  std::set<int> residues;
  for (int s = 1; s <= width; ++s) {
    residues.insert(s % d);
    residues.insert((d - s % d) % d);
  }
  residues.erase(0);
  const double scale = 1.0 / (static_cast<double>(d) * width);
  std::vector<double> spectrum(d);
  for (int k = 0; k < d; ++k) {
    double sum = 0.0;
    for (const int s : residues) {
      // Reduce s*k mod d first so the cosine argument stays in [0, 2 pi).
      const long long phase = (static_cast<long long>(s) * k) % d;
      sum += 1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(phase) / d);
    }
    spectrum[k] = scale * sum;
  }
  return spectrum;
}

Eigen::MatrixXd circulant_cayley_laplacian(int d, int width) {
  if (d < 2) throw ArgumentError("circulant_cayley_laplacian: d must be >= 2");
  if (width < 1 || width > d - 1) {
    throw ArgumentError("circulant_cayley_laplacian: width must lie in [1, d-1]");
  }
  const double weight = 1.0 / (static_cast<double>(d) * width);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      const int gap = std::abs(i - j);
      if (gap <= width || d - gap <= width) l(i, j) = -weight;
    }
  }
  for (int i = 0; i < d; ++i) l(i, i) = -l.row(i).sum();
  return l;
}

}  // namespace btl
