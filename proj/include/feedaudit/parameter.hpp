// Copyright 2026 The feedaudit Authors
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

#ifndef FEEDAUDIT_PARAMETER_HPP_
#define FEEDAUDIT_PARAMETER_HPP_

#include <Eigen/Dense>
#include <array>
#include <initializer_list>
#include <vector>

#include "feedaudit/errors.hpp"

namespace feedaudit {

// A point in a model family's parameter space. Entries are guaranteed finite;
// membership in a particular family's domain is checked by the family.
class ParameterVector {
 public:
  ParameterVector() = default;

  explicit ParameterVector(Eigen::VectorXd values) : values_(std::move(values)) {
    if (!values_.allFinite()) {
      throw DomainError("parameter vector has non-finite entries");
    }
  }

  ParameterVector(std::initializer_list<double> values)
      : ParameterVector(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
            values.begin(), static_cast<Eigen::Index>(values.size())))) {}

  Eigen::Index dimension() const { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }
  const Eigen::VectorXd& values() const { return values_; }

  friend bool operator==(const ParameterVector& a, const ParameterVector& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  Eigen::VectorXd values_;
};

// Closed bounded box of per-coordinate intervals. Every interval must have
// strictly positive width, so the box has positive volume.
class DomainBox {
 public:
  DomainBox() = default;

  explicit DomainBox(std::vector<std::array<double, 2>> intervals)
      : intervals_(std::move(intervals)) {
    for (const auto& iv : intervals_) {
      if (!std::isfinite(iv[0]) || !std::isfinite(iv[1])) {
        throw DomainError("domain interval bounds must be finite");
      }
      if (!(iv[0] < iv[1])) {
        throw DomainError("domain interval must have positive width");
      }
    }
  }

  Eigen::Index dimension() const { return static_cast<Eigen::Index>(intervals_.size()); }
  double lo(Eigen::Index i) const { return intervals_[static_cast<std::size_t>(i)][0]; }
  double hi(Eigen::Index i) const { return intervals_[static_cast<std::size_t>(i)][1]; }
  const std::vector<std::array<double, 2>>& intervals() const { return intervals_; }

  bool contains(const Eigen::VectorXd& theta) const {
    if (theta.size() != dimension()) return false;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      if (theta[i] < lo(i) || theta[i] > hi(i)) return false;
    }
    return true;
  }

  Eigen::VectorXd clamp(const Eigen::VectorXd& theta) const {
    if (theta.size() != dimension()) {
      throw ShapeError("vector/box dimension mismatch");
    }
    Eigen::VectorXd out = theta;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      out[i] = std::min(std::max(out[i], lo(i)), hi(i));
    }
    return out;
  }

 private:
  std::vector<std::array<double, 2>> intervals_;
};

// Fisher information matrix. Construction validates symmetry (1e-12 relative)
// and positive semi-definiteness (eigenvalues >= -1e-10 * spectral norm).
class FisherMatrix {
 public:
  explicit FisherMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
      throw ShapeError("Fisher matrix must be square and nonempty");
    }
    if (!entries_.allFinite()) {
      throw SingularInformationError("Fisher matrix has non-finite entries");
    }
    const double scale = entries_.cwiseAbs().maxCoeff();
    const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(scale, 1e-300)) {
      throw DomainError("Fisher matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries_, Eigen::EigenvaluesOnly);
    const double max_eig = solver.eigenvalues().cwiseAbs().maxCoeff();
    if (solver.eigenvalues().minCoeff() < -1e-10 * max_eig) {
      throw DomainError("Fisher matrix is not positive semi-definite");
    }
  }

  Eigen::Index dimension() const { return entries_.rows(); }
  const Eigen::MatrixXd& entries() const { return entries_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

 private:
  Eigen::MatrixXd entries_;
};

}  // namespace feedaudit

#endif  // FEEDAUDIT_PARAMETER_HPP_
