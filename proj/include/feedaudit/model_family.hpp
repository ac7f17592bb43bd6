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

#ifndef FEEDAUDIT_MODEL_FAMILY_HPP_
#define FEEDAUDIT_MODEL_FAMILY_HPP_

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "feedaudit/feed.hpp"
#include "feedaudit/parameter.hpp"
#include "feedaudit/rng.hpp"

namespace feedaudit {

enum class SampleSpaceKind { kReal, kBit, kSymbol };

struct SampleSpace {
  SampleSpaceKind kind = SampleSpaceKind::kReal;
  int alphabet_size = 0;  // only for kSymbol
};

struct MleResult {
  ParameterVector theta;
  // True when the estimate was pushed onto the domain boundary (e.g. an
  // all-identical Gaussian feed whose variance estimate hits the box floor).
  bool boundary = false;
};

// A parametric family {p_z(. ; theta) : theta in a closed bounded box}.
// Instances are immutable after construction and safe to share across
// threads; all randomness flows through caller-supplied streams.
//
// Shipped families: gaussian-mean-var (theta = (mu, sigma2)),
// gaussian-known-var (theta = (mu), sigma2 fixed), bernoulli (theta = (p)),
// and categorical-k (theta = first k-1 probabilities, last implied).
class ModelFamily {
 public:
  virtual ~ModelFamily() = default;

  ModelFamily(const ModelFamily&) = delete;
  ModelFamily& operator=(const ModelFamily&) = delete;

  const std::string& id() const { return id_; }
  int dimension() const { return static_cast<int>(domain_.dimension()); }
  const DomainBox& domain() const { return domain_; }
  const SampleSpace& sample_space() const { return space_; }

  bool in_sample_space(double z) const;

  // Throws DomainError unless theta has the right dimension, is finite, and
  // lies inside the domain box.
  void require_in_domain(const ParameterVector& theta) const;

  // log p_z(z; theta). Returns -infinity for z outside the support (that is
  // not an error); throws DomainError for theta outside the domain.
  double log_density(const ParameterVector& theta, double z) const;

  // m i.i.d. draws. Deterministic given (stream seed, theta, m).
  Feed sample_feed(const ParameterVector& theta, int m, SeedStream& rng) const;

  // Maximum likelihood estimate over the domain box, computed in closed
  // form. When the unconstrained optimum falls outside the box the result
  // is the box-constrained maximizer and the boundary flag is set.
  MleResult mle(const Feed& feed) const;

  // Analytic Fisher information at theta. Throws SingularInformationError
  // where the information degenerates (sigma2 = 0, p in {0, 1}, ...).
  FisherMatrix fisher_information(const ParameterVector& theta) const;

  // Sufficient statistics of a feed, and the per-item average log-likelihood
  // and score expressed through them. These back the generic numerical MLE.
  Eigen::VectorXd sufficient_stats(const Feed& feed) const;
  double mean_log_likelihood(const Eigen::VectorXd& stats, const ParameterVector& theta) const;
  Eigen::VectorXd mean_score(const Eigen::VectorXd& stats, const ParameterVector& theta) const;

  // JSON descriptor: {"id": ..., "dimension": r, "domain": [[lo,hi],...],
  // "fixed": {...}}.
  nlohmann::json descriptor() const;

  // Factory with per-family default domains.
  static std::shared_ptr<const ModelFamily> make(const std::string& id);
  static std::shared_ptr<const ModelFamily> make(const std::string& id, DomainBox domain);
  static std::shared_ptr<const ModelFamily> make(const std::string& id, DomainBox domain,
                                                 const nlohmann::json& fixed);
  static std::shared_ptr<const ModelFamily> from_descriptor(const nlohmann::json& descriptor);

 protected:
  ModelFamily(std::string id, DomainBox domain, SampleSpace space)
      : id_(std::move(id)), domain_(std::move(domain)), space_(space) {}

  virtual double log_density_impl(const ParameterVector& theta, double z) const = 0;
  virtual double sample_one(const ParameterVector& theta, SeedStream& rng) const = 0;
  virtual MleResult mle_impl(const Feed& feed) const = 0;
  virtual Eigen::MatrixXd fisher_impl(const ParameterVector& theta) const = 0;
  virtual Eigen::VectorXd sufficient_stats_impl(const Feed& feed) const = 0;
  virtual double mean_log_likelihood_impl(const Eigen::VectorXd& stats,
                                          const ParameterVector& theta) const = 0;
  virtual Eigen::VectorXd mean_score_impl(const Eigen::VectorXd& stats,
                                          const ParameterVector& theta) const = 0;
  virtual nlohmann::json fixed_params() const { return nlohmann::json::object(); }

 private:
  std::string id_;
  DomainBox domain_;
  SampleSpace space_;
};

// Generic MLE by projected gradient ascent on the mean log-likelihood, with
// analytic (score-based) gradients, random restarts, and ties broken by
// likelihood then lexicographically smallest parameter. Used to cross-check
// the closed forms; both compute the box-constrained maximizer.
// The iteration cap covers the worst conditioning the domain boxes allow
// (steepest ascent contracts by (k-1)/(k+1) per exact line search, and the
// Gaussian box corner reaches k = 2 sigma2 = 50).
MleResult numerical_mle(const ModelFamily& family, const Feed& feed, SeedStream& rng,
                        int restarts = 10, int max_iterations = 2000,
                        double gradient_tolerance = 1e-9);

struct RegularityCheck {
  std::string condition;
  bool pass = false;
  std::string witness;  // first failing point, or a short note
};

struct RegularityReport {
  std::string family_id;
  std::vector<RegularityCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

// Checks the machine-checkable regularity conditions: domain boundedness and
// convexity, support independence of theta (spot-checked on a grid), and
// Fisher positive-definiteness on a grid over the box (including endpoints).
RegularityReport validate_regularity(const ModelFamily& family, int grid_points_per_dim = 5);

}  // namespace feedaudit

#endif  // FEEDAUDIT_MODEL_FAMILY_HPP_
