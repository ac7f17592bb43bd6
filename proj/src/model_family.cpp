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

#include "feedaudit/model_family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace feedaudit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

bool is_integral_value(double z) { return std::isfinite(z) && z == std::floor(z); }

std::string format_theta(const Eigen::VectorXd& theta) {
  std::ostringstream out;
  out << "(";
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (i > 0) out << ", ";
    out << theta[i];
  }
  out << ")";
  return out.str();
}

// ---------------------------------------------------------------------------
// gaussian-mean-var: theta = (mu, sigma2), Z = R.

class GaussianMeanVarFamily final : public ModelFamily {
 public:
  explicit GaussianMeanVarFamily(DomainBox domain)
      : ModelFamily("gaussian-mean-var", std::move(domain), {SampleSpaceKind::kReal, 0}) {
    if (dimension() != 2) {
      throw DomainError("gaussian-mean-var expects a 2-dimensional domain (mu, sigma2)");
    }
    if (this->domain().lo(1) < 0.0) {
      throw DomainError("gaussian-mean-var variance interval must lie in [0, inf)");
    }
  }

 protected:
  double log_density_impl(const ParameterVector& theta, double z) const override {
    const double mu = theta[0];
    const double sigma2 = theta[1];
    if (sigma2 <= 0.0) {
      // Degenerate point mass at mu.
      return z == mu ? std::numeric_limits<double>::infinity() : kNegInf;
    }
    const double d = z - mu;
    return -0.5 * (kLogTwoPi + std::log(sigma2)) - 0.5 * d * d / sigma2;
  }

  double sample_one(const ParameterVector& theta, SeedStream& rng) const override {
    return theta[0] + std::sqrt(theta[1]) * rng.normal01();
  }

  MleResult mle_impl(const Feed& feed) const override {
    const double m = static_cast<double>(feed.size());
    double mean = 0.0;
    for (double z : feed) mean += z;
    mean /= m;
    double var = 0.0;
    for (double z : feed) var += (z - mean) * (z - mean);
    var /= m;

    // Constrained maximizer: the optimal mu is the clamped sample mean for
    // every sigma2; given that mu, the optimal sigma2 is the mean squared
    // deviation about it, clamped.
    const double mu_hat = std::clamp(mean, domain().lo(0), domain().hi(0));
    const double v = var + (mean - mu_hat) * (mean - mu_hat);
    const double sigma2_hat = std::clamp(v, domain().lo(1), domain().hi(1));

    MleResult result;
    result.theta = ParameterVector(Eigen::Vector2d(mu_hat, sigma2_hat));
    result.boundary = (mu_hat != mean) || (sigma2_hat != v);
    return result;
  }

  Eigen::MatrixXd fisher_impl(const ParameterVector& theta) const override {
    const double sigma2 = theta[1];
    if (sigma2 <= 0.0) {
      throw SingularInformationError("gaussian Fisher information undefined at sigma2 = " +
                                     std::to_string(sigma2));
    }
    Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
    info(0, 0) = 1.0 / sigma2;
    info(1, 1) = 1.0 / (2.0 * sigma2 * sigma2);
    return info;
  }

  Eigen::VectorXd sufficient_stats_impl(const Feed& feed) const override {
    double mean = 0.0;
    double mean_sq = 0.0;
    for (double z : feed) {
      mean += z;
      mean_sq += z * z;
    }
    const double m = static_cast<double>(feed.size());
    return Eigen::Vector2d(mean / m, mean_sq / m);
  }

  double mean_log_likelihood_impl(const Eigen::VectorXd& stats,
                                  const ParameterVector& theta) const override {
    const double mu = theta[0];
    const double sigma2 = theta[1];
    if (sigma2 <= 0.0) return kNegInf;
    const double msd = stats[1] - 2.0 * mu * stats[0] + mu * mu;
    return -0.5 * (kLogTwoPi + std::log(sigma2)) - 0.5 * msd / sigma2;
  }

  Eigen::VectorXd mean_score_impl(const Eigen::VectorXd& stats,
                                  const ParameterVector& theta) const override {
    const double mu = theta[0];
    const double sigma2 = theta[1];
    const double msd = stats[1] - 2.0 * mu * stats[0] + mu * mu;
    Eigen::Vector2d score;
    score[0] = (stats[0] - mu) / sigma2;
    score[1] = -0.5 / sigma2 + 0.5 * msd / (sigma2 * sigma2);
    return score;
  }
};

// ---------------------------------------------------------------------------
// gaussian-known-var: theta = (mu), sigma2 fixed, Z = R.

class GaussianKnownVarFamily final : public ModelFamily {
 public:
  GaussianKnownVarFamily(DomainBox domain, double sigma2)
      : ModelFamily("gaussian-known-var", std::move(domain), {SampleSpaceKind::kReal, 0}),
        sigma2_(sigma2) {
    if (dimension() != 1) {
      throw DomainError("gaussian-known-var expects a 1-dimensional domain (mu)");
    }
    if (!(sigma2_ > 0.0) || !std::isfinite(sigma2_)) {
      throw DomainError("gaussian-known-var requires fixed sigma2 > 0");
    }
  }

 protected:
  double log_density_impl(const ParameterVector& theta, double z) const override {
    const double d = z - theta[0];
    return -0.5 * (kLogTwoPi + std::log(sigma2_)) - 0.5 * d * d / sigma2_;
  }

  double sample_one(const ParameterVector& theta, SeedStream& rng) const override {
    return theta[0] + std::sqrt(sigma2_) * rng.normal01();
  }

  MleResult mle_impl(const Feed& feed) const override {
    double mean = 0.0;
    for (double z : feed) mean += z;
    mean /= static_cast<double>(feed.size());
    const double mu_hat = std::clamp(mean, domain().lo(0), domain().hi(0));
    MleResult result;
    result.theta = ParameterVector(Eigen::VectorXd::Constant(1, mu_hat));
    result.boundary = mu_hat != mean;
    return result;
  }

  Eigen::MatrixXd fisher_impl(const ParameterVector&) const override {
    Eigen::MatrixXd info(1, 1);
    info(0, 0) = 1.0 / sigma2_;
    return info;
  }

  Eigen::VectorXd sufficient_stats_impl(const Feed& feed) const override {
    double mean = 0.0;
    double mean_sq = 0.0;
    for (double z : feed) {
      mean += z;
      mean_sq += z * z;
    }
    const double m = static_cast<double>(feed.size());
    return Eigen::Vector2d(mean / m, mean_sq / m);
  }

  double mean_log_likelihood_impl(const Eigen::VectorXd& stats,
                                  const ParameterVector& theta) const override {
    const double mu = theta[0];
    const double msd = stats[1] - 2.0 * mu * stats[0] + mu * mu;
    return -0.5 * (kLogTwoPi + std::log(sigma2_)) - 0.5 * msd / sigma2_;
  }

  Eigen::VectorXd mean_score_impl(const Eigen::VectorXd& stats,
                                  const ParameterVector& theta) const override {
    return Eigen::VectorXd::Constant(1, (stats[0] - theta[0]) / sigma2_);
  }

  nlohmann::json fixed_params() const override { return {{"sigma2", sigma2_}}; }

 private:
  double sigma2_;
};

// ---------------------------------------------------------------------------
// bernoulli: theta = (p), Z = {0, 1}.

class BernoulliFamily final : public ModelFamily {
 public:
  explicit BernoulliFamily(DomainBox domain)
      : ModelFamily("bernoulli", std::move(domain), {SampleSpaceKind::kBit, 0}) {
    if (dimension() != 1) {
      throw DomainError("bernoulli expects a 1-dimensional domain (p)");
    }
    if (this->domain().lo(0) < 0.0 || this->domain().hi(0) > 1.0) {
      throw DomainError("bernoulli domain must lie within [0, 1]");
    }
  }

 protected:
  double log_density_impl(const ParameterVector& theta, double z) const override {
    const double p = theta[0];
    if (z == 1.0) return p > 0.0 ? std::log(p) : kNegInf;
    return p < 1.0 ? std::log1p(-p) : kNegInf;
  }

  double sample_one(const ParameterVector& theta, SeedStream& rng) const override {
    return rng.uniform01() < theta[0] ? 1.0 : 0.0;
  }

  MleResult mle_impl(const Feed& feed) const override {
    double ones = 0.0;
    for (double z : feed) ones += z;
    const double p = ones / static_cast<double>(feed.size());
    const double p_hat = std::clamp(p, domain().lo(0), domain().hi(0));
    MleResult result;
    result.theta = ParameterVector(Eigen::VectorXd::Constant(1, p_hat));
    result.boundary = p_hat != p;
    return result;
  }

  Eigen::MatrixXd fisher_impl(const ParameterVector& theta) const override {
    const double p = theta[0];
    if (p <= 0.0 || p >= 1.0) {
      throw SingularInformationError("bernoulli Fisher information diverges at p = " +
                                     std::to_string(p));
    }
    Eigen::MatrixXd info(1, 1);
    info(0, 0) = 1.0 / (p * (1.0 - p));
    return info;
  }

  Eigen::VectorXd sufficient_stats_impl(const Feed& feed) const override {
    double ones = 0.0;
    for (double z : feed) ones += z;
    return Eigen::VectorXd::Constant(1, ones / static_cast<double>(feed.size()));
  }

  double mean_log_likelihood_impl(const Eigen::VectorXd& stats,
                                  const ParameterVector& theta) const override {
    const double p_hat = stats[0];
    const double p = theta[0];
    double out = 0.0;
    if (p_hat > 0.0) out += (p > 0.0) ? p_hat * std::log(p) : kNegInf;
    if (p_hat < 1.0) out += (p < 1.0) ? (1.0 - p_hat) * std::log1p(-p) : kNegInf;
    return out;
  }

  Eigen::VectorXd mean_score_impl(const Eigen::VectorXd& stats,
                                  const ParameterVector& theta) const override {
    const double p_hat = stats[0];
    const double p = theta[0];
    double g = 0.0;
    if (p_hat > 0.0) g += p_hat / p;
    if (p_hat < 1.0) g -= (1.0 - p_hat) / (1.0 - p);
    return Eigen::VectorXd::Constant(1, g);
  }
};

// ---------------------------------------------------------------------------
// categorical-k: theta = first k-1 probabilities, last implied.
// The domain box must sit strictly inside the probability simplex (sum of
// upper bounds < 1) so that every box point is a valid distribution.

class CategoricalFamily final : public ModelFamily {
 public:
  CategoricalFamily(int k, DomainBox domain)
      : ModelFamily("categorical-" + std::to_string(k), std::move(domain),
                    {SampleSpaceKind::kSymbol, k}),
        k_(k) {
    if (k_ < 2) throw DomainError("categorical alphabet size must be >= 2");
    if (dimension() != k_ - 1) {
      throw DomainError("categorical-" + std::to_string(k_) + " expects a " +
                        std::to_string(k_ - 1) + "-dimensional domain");
    }
    double lo_sum = 0.0;
    double hi_sum = 0.0;
    for (int i = 0; i < k_ - 1; ++i) {
      if (this->domain().lo(i) < 0.0 || this->domain().hi(i) > 1.0) {
        throw DomainError("categorical probabilities must lie within [0, 1]");
      }
      lo_sum += this->domain().lo(i);
      hi_sum += this->domain().hi(i);
    }
    (void)lo_sum;
    if (!(hi_sum < 1.0)) {
      throw DomainError(
          "categorical domain box must sit strictly inside the simplex "
          "(sum of upper bounds < 1)");
    }
  }

 protected:
  double log_density_impl(const ParameterVector& theta, double z) const override {
    const int symbol = static_cast<int>(z);
    const double p = probability(theta.values(), symbol);
    return p > 0.0 ? std::log(p) : kNegInf;
  }

  double sample_one(const ParameterVector& theta, SeedStream& rng) const override {
    const double u = rng.uniform01();
    double cum = 0.0;
    for (int i = 0; i < k_ - 1; ++i) {
      cum += theta[i];
      if (u < cum) return static_cast<double>(i);
    }
    return static_cast<double>(k_ - 1);
  }

  MleResult mle_impl(const Feed& feed) const override {
    const Eigen::VectorXd freq = sufficient_stats_impl(feed);
    const double f_last = freq[k_ - 1];
    const int r = k_ - 1;
    Eigen::VectorXd p(r);
    bool clamped = false;

    if (f_last == 0.0) {
      // No mass on the implied symbol: the box constraint is the only thing
      // holding the free coordinates back, so each goes to its bound.
      for (int i = 0; i < r; ++i) {
        p[i] = freq[i] > 0.0 ? domain().hi(i) : domain().lo(i);
      }
      clamped = true;
    } else {
      // Solve h(t) = f_last*t + sum_i clamp(f_i*t, lo_i, hi_i) - 1 = 0;
      // h is continuous and strictly increasing, and the root gives the
      // box-constrained maximizer p_i = clamp(f_i * t).
      const auto h = [&](double t) {
        double s = f_last * t;
        for (int i = 0; i < r; ++i) {
          s += std::clamp(freq[i] * t, domain().lo(i), domain().hi(i));
        }
        return s - 1.0;
      };
      double lo_sum = 0.0;
      for (int i = 0; i < r; ++i) lo_sum += domain().lo(i);
      double t_lo = 0.0;
      double t_hi = (1.0 - lo_sum) / f_last;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (t_lo + t_hi);
        if (h(mid) < 0.0) {
          t_lo = mid;
        } else {
          t_hi = mid;
        }
      }
      const double t = 0.5 * (t_lo + t_hi);
      for (int i = 0; i < r; ++i) {
        const double raw = freq[i] * t;
        p[i] = std::clamp(raw, domain().lo(i), domain().hi(i));
        clamped = clamped || (p[i] != raw);
      }
    }

    MleResult result;
    result.theta = ParameterVector(p);
    result.boundary = clamped;
    return result;
  }

  Eigen::MatrixXd fisher_impl(const ParameterVector& theta) const override {
    const int r = k_ - 1;
    const double p_last = probability(theta.values(), k_ - 1);
    if (p_last <= 0.0) {
      throw SingularInformationError("categorical Fisher diverges: implied probability is 0");
    }
    Eigen::MatrixXd info = Eigen::MatrixXd::Constant(r, r, 1.0 / p_last);
    for (int i = 0; i < r; ++i) {
      if (theta[i] <= 0.0) {
        throw SingularInformationError("categorical Fisher diverges at p_" + std::to_string(i) +
                                       " = 0");
      }
      info(i, i) += 1.0 / theta[i];
    }
    return info;
  }

  Eigen::VectorXd sufficient_stats_impl(const Feed& feed) const override {
    Eigen::VectorXd freq = Eigen::VectorXd::Zero(k_);
    for (double z : feed) freq[static_cast<int>(z)] += 1.0;
    return freq / static_cast<double>(feed.size());
  }

  double mean_log_likelihood_impl(const Eigen::VectorXd& stats,
                                  const ParameterVector& theta) const override {
    double out = 0.0;
    for (int i = 0; i < k_; ++i) {
      if (stats[i] == 0.0) continue;
      const double p = probability(theta.values(), i);
      out += p > 0.0 ? stats[i] * std::log(p) : kNegInf;
    }
    return out;
  }

  Eigen::VectorXd mean_score_impl(const Eigen::VectorXd& stats,
                                  const ParameterVector& theta) const override {
    const int r = k_ - 1;
    const double p_last = probability(theta.values(), k_ - 1);
    const double last_term = stats[k_ - 1] == 0.0 ? 0.0 : stats[k_ - 1] / p_last;
    Eigen::VectorXd score(r);
    for (int i = 0; i < r; ++i) {
      const double own = stats[i] == 0.0 ? 0.0 : stats[i] / theta[i];
      score[i] = own - last_term;
    }
    return score;
  }

 private:
  double probability(const Eigen::VectorXd& theta, int symbol) const {
    if (symbol < k_ - 1) return theta[symbol];
    return 1.0 - theta.sum();
  }

  int k_;
};

bool parse_categorical_k(const std::string& id, int* k_out);

DomainBox default_domain(const std::string& id) {
  if (id == "gaussian-mean-var") {
    return DomainBox({{-10.0, 10.0}, {0.01, 25.0}});
  }
  if (id == "gaussian-known-var") {
    return DomainBox({{-10.0, 10.0}});
  }
  if (id == "bernoulli") {
    return DomainBox({{0.01, 0.99}});
  }
  int k = 0;
  if (parse_categorical_k(id, &k) && k >= 2) {
    std::vector<std::array<double, 2>> intervals(
        static_cast<std::size_t>(k - 1), {0.02, 0.9 / static_cast<double>(k - 1)});
    return DomainBox(std::move(intervals));
  }
  throw ConfigError("unknown model family id '" + id + "'");
}

bool parse_categorical_k(const std::string& id, int* k_out) {
  const std::string prefix = "categorical-";
  if (id.rfind(prefix, 0) != 0 || id.size() == prefix.size()) return false;
  int k = 0;
  for (std::size_t i = prefix.size(); i < id.size(); ++i) {
    if (id[i] < '0' || id[i] > '9') return false;
    k = k * 10 + (id[i] - '0');
    if (k > 1000) return false;
  }
  *k_out = k;
  return true;
}

}  // namespace

bool ModelFamily::in_sample_space(double z) const {
  switch (space_.kind) {
    case SampleSpaceKind::kReal:
      return std::isfinite(z);
    case SampleSpaceKind::kBit:
      return z == 0.0 || z == 1.0;
    case SampleSpaceKind::kSymbol:
      return is_integral_value(z) && z >= 0.0 && z < static_cast<double>(space_.alphabet_size);
  }
  return false;
}

void ModelFamily::require_in_domain(const ParameterVector& theta) const {
  if (theta.dimension() != domain_.dimension()) {
    throw DomainError("parameter dimension " + std::to_string(theta.dimension()) +
                      " does not match family dimension " + std::to_string(dimension()));
  }
  if (!domain_.contains(theta.values())) {
    throw DomainError("parameter " + format_theta(theta.values()) +
                      " lies outside the domain of " + id_);
  }
}

double ModelFamily::log_density(const ParameterVector& theta, double z) const {
  require_in_domain(theta);
  if (!in_sample_space(z)) return kNegInf;
  return log_density_impl(theta, z);
}

Feed ModelFamily::sample_feed(const ParameterVector& theta, int m, SeedStream& rng) const {
  require_in_domain(theta);
  if (m < 1) throw EmptyFeedError("sample_feed requires m >= 1");
  Feed feed(static_cast<std::size_t>(m));
  for (auto& z : feed) z = sample_one(theta, rng);
  return feed;
}

MleResult ModelFamily::mle(const Feed& feed) const {
  if (feed.empty()) throw EmptyFeedError("MLE requires a nonempty feed");
  for (double z : feed) {
    if (!in_sample_space(z)) {
      throw DomainError("feed item " + std::to_string(z) + " is outside the sample space of " +
                        id_);
    }
  }
  return mle_impl(feed);
}

FisherMatrix ModelFamily::fisher_information(const ParameterVector& theta) const {
  require_in_domain(theta);
  return FisherMatrix(fisher_impl(theta));
}

Eigen::VectorXd ModelFamily::sufficient_stats(const Feed& feed) const {
  if (feed.empty()) throw EmptyFeedError("sufficient_stats requires a nonempty feed");
  return sufficient_stats_impl(feed);
}

double ModelFamily::mean_log_likelihood(const Eigen::VectorXd& stats,
                                        const ParameterVector& theta) const {
  return mean_log_likelihood_impl(stats, theta);
}

Eigen::VectorXd ModelFamily::mean_score(const Eigen::VectorXd& stats,
                                        const ParameterVector& theta) const {
  return mean_score_impl(stats, theta);
}

nlohmann::json ModelFamily::descriptor() const {
  nlohmann::json domain = nlohmann::json::array();
  for (const auto& iv : domain_.intervals()) {
    domain.push_back({iv[0], iv[1]});
  }
  return {{"id", id_}, {"dimension", dimension()}, {"domain", domain}, {"fixed", fixed_params()}};
}

std::shared_ptr<const ModelFamily> ModelFamily::make(const std::string& id) {
  return make(id, default_domain(id));
}

std::shared_ptr<const ModelFamily> ModelFamily::make(const std::string& id, DomainBox domain) {
  return make(id, std::move(domain), nlohmann::json::object());
}

std::shared_ptr<const ModelFamily> ModelFamily::make(const std::string& id, DomainBox domain,
                                                     const nlohmann::json& fixed) {
  for (const auto& item : fixed.items()) {
    if (id == "gaussian-known-var" && item.key() == "sigma2") continue;
    throw ConfigError("unknown fixed parameter '" + item.key() + "' for family " + id);
  }
  if (id == "gaussian-mean-var") {
    return std::make_shared<GaussianMeanVarFamily>(std::move(domain));
  }
  if (id == "gaussian-known-var") {
    const double sigma2 = fixed.value("sigma2", 1.0);
    return std::make_shared<GaussianKnownVarFamily>(std::move(domain), sigma2);
  }
  if (id == "bernoulli") {
    return std::make_shared<BernoulliFamily>(std::move(domain));
  }
  int k = 0;
  if (parse_categorical_k(id, &k)) {
    return std::make_shared<CategoricalFamily>(k, std::move(domain));
  }
  throw ConfigError("unknown model family id '" + id + "'");
}

std::shared_ptr<const ModelFamily> ModelFamily::from_descriptor(const nlohmann::json& descriptor) {
  if (!descriptor.is_object()) throw ConfigError("family descriptor must be a JSON object");
  for (const auto& item : descriptor.items()) {
    if (item.key() != "id" && item.key() != "dimension" && item.key() != "domain" &&
        item.key() != "fixed") {
      throw ConfigError("unknown key '" + item.key() + "' in family descriptor");
    }
  }
  if (!descriptor.contains("id") || !descriptor["id"].is_string()) {
    throw ConfigError("family descriptor requires a string 'id'");
  }
  const std::string id = descriptor["id"].get<std::string>();

  std::shared_ptr<const ModelFamily> family;
  const nlohmann::json fixed =
      descriptor.contains("fixed") ? descriptor["fixed"] : nlohmann::json::object();
  if (!fixed.is_object()) throw ConfigError("family 'fixed' must be a JSON object");

  if (descriptor.contains("domain")) {
    const auto& dom = descriptor["domain"];
    if (!dom.is_array() || dom.empty()) {
      throw ConfigError("family 'domain' must be a nonempty array of [lo, hi] pairs");
    }
    std::vector<std::array<double, 2>> intervals;
    for (const auto& iv : dom) {
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
        throw ConfigError("family 'domain' entries must be [lo, hi] number pairs");
      }
      intervals.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
    family = make(id, DomainBox(std::move(intervals)), fixed);
  } else {
    family = make(id, default_domain(id), fixed);
  }

  if (descriptor.contains("dimension")) {
    if (!descriptor["dimension"].is_number_integer() ||
        descriptor["dimension"].get<int>() != family->dimension()) {
      throw ConfigError("family descriptor 'dimension' does not match " + id);
    }
  }
  return family;
}

// ---------------------------------------------------------------------------
// Generic numerical MLE.

namespace {

Eigen::VectorXd project_gradient(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
                                 const DomainBox& box) {
  Eigen::VectorXd pg = grad;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if ((theta[i] <= box.lo(i) && grad[i] < 0.0) || (theta[i] >= box.hi(i) && grad[i] > 0.0)) {
      pg[i] = 0.0;
    }
  }
  return pg;
}

bool lexicographically_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

MleResult numerical_mle(const ModelFamily& family, const Feed& feed, SeedStream& rng,
                        int restarts, int max_iterations, double gradient_tolerance) {
  if (feed.empty()) throw EmptyFeedError("MLE requires a nonempty feed");
  const Eigen::VectorXd stats = family.sufficient_stats(feed);
  const DomainBox& box = family.domain();
  const Eigen::Index r = box.dimension();

  const auto objective = [&](const Eigen::VectorXd& theta) {
    return family.mean_log_likelihood(stats, ParameterVector(theta));
  };
  const auto gradient = [&](const Eigen::VectorXd& theta) {
    return family.mean_score(stats, ParameterVector(theta));
  };

  Eigen::VectorXd best;
  double best_value = kNegInf;

  for (int restart = 0; restart < restarts; ++restart) {
    Eigen::VectorXd theta(r);
    for (Eigen::Index i = 0; i < r; ++i) {
      // Inset starts so the objective is finite at the initial point.
      theta[i] = box.lo(i) + (0.05 + 0.9 * rng.uniform01()) * (box.hi(i) - box.lo(i));
    }
    double value = objective(theta);

    for (int iter = 0; iter < max_iterations; ++iter) {
      const Eigen::VectorXd grad = gradient(theta);
      if (project_gradient(theta, grad, box).norm() < gradient_tolerance) break;

      // Line search along the projected gradient path: halve until the
      // Armijo condition holds, then expand while the value keeps improving.
      const auto value_at = [&](double s, Eigen::VectorXd* point) {
        *point = box.clamp(theta + s * grad);
        return objective(*point);
      };
      double s = 1.0;
      Eigen::VectorXd candidate;
      double candidate_value = value_at(s, &candidate);
      bool accepted = false;
      for (int halve = 0; halve < 80; ++halve) {
        const Eigen::VectorXd d = candidate - theta;
        if (d.squaredNorm() > 0.0 && candidate_value >= value + 1e-4 * grad.dot(d)) {
          accepted = true;
          break;
        }
        s *= 0.5;
        candidate_value = value_at(s, &candidate);
      }
      if (!accepted) break;  // no improving step left at this precision
      for (int expand = 0; expand < 80; ++expand) {
        Eigen::VectorXd next;
        const double next_value = value_at(2.0 * s, &next);
        if (!(next_value > candidate_value)) break;
        s *= 2.0;
        candidate = next;
        candidate_value = next_value;
      }
      // Polish the step by bisecting the directional derivative along the
      // projected path. The analytic score keeps full precision where
      // objective differences fall below float resolution, so the exact
      // line search the steepest-ascent rate depends on stays exact.
      const auto path_derivative = [&](double step) {
        const Eigen::VectorXd point = box.clamp(theta + step * grad);
        const Eigen::VectorXd g = gradient(point);
        double total = 0.0;
        for (Eigen::Index i = 0; i < r; ++i) {
          const double raw = theta[i] + step * grad[i];
          if (raw >= box.lo(i) && raw <= box.hi(i)) total += g[i] * grad[i];
        }
        return total;
      };
      double s_lo = 0.0;
      double s_hi = 2.0 * s;
      int guard = 0;
      while (path_derivative(s_hi) > 0.0 && ++guard < 60) {
        s_lo = s_hi;
        s_hi *= 2.0;
      }
      if (guard < 60) {
        for (int bisect = 0; bisect < 80; ++bisect) {
          const double mid = 0.5 * (s_lo + s_hi);
          (path_derivative(mid) > 0.0 ? s_lo : s_hi) = mid;
        }
        Eigen::VectorXd polished;
        const double polished_value = value_at(0.5 * (s_lo + s_hi), &polished);
        // The objective comparison alone cannot see sub-resolution progress;
        // require the projected gradient to shrink as well.
        if (polished_value >= candidate_value &&
            project_gradient(polished, gradient(polished), box).norm() <
                project_gradient(candidate, gradient(candidate), box).norm()) {
          candidate = polished;
          candidate_value = polished_value;
        }
      }

      if ((candidate - theta).squaredNorm() == 0.0) break;  // no movement left
      theta = candidate;
      value = candidate_value;
    }

    if (best.size() == 0 || value > best_value + 1e-12 * (1.0 + std::abs(best_value))) {
      best = theta;
      best_value = value;
    } else if (value >= best_value - 1e-12 * (1.0 + std::abs(best_value)) &&
               lexicographically_less(theta, best)) {
      best = theta;
      best_value = std::max(best_value, value);
    }
  }

  // Tie-break exactly flat directions (zero score, unchanged likelihood) to
  // the lexicographically smallest value, i.e. the lower box bound.
  const Eigen::VectorXd final_grad = gradient(best);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (best[i] > box.lo(i) && final_grad[i] == 0.0) {
      Eigen::VectorXd probe = best;
      probe[i] = box.lo(i);
      const double probe_value = objective(probe);
      if (probe_value >= best_value) {
        best = probe;
        best_value = probe_value;
      }
    }
  }

  MleResult result;
  result.theta = ParameterVector(best);
  const Eigen::VectorXd grad = gradient(best);
  for (Eigen::Index i = 0; i < r; ++i) {
    if ((best[i] <= box.lo(i) && grad[i] <= 0.0) || (best[i] >= box.hi(i) && grad[i] >= 0.0)) {
      result.boundary = true;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Regularity checks.

namespace {

void grid_points(const DomainBox& box, int per_dim, Eigen::Index coord, Eigen::VectorXd* current,
                 std::vector<Eigen::VectorXd>* out) {
  if (coord == box.dimension()) {
    out->push_back(*current);
    return;
  }
  for (int i = 0; i < per_dim; ++i) {
    const double t = per_dim == 1 ? 0.5 : static_cast<double>(i) / (per_dim - 1);
    (*current)[coord] = box.lo(coord) + t * (box.hi(coord) - box.lo(coord));
    grid_points(box, per_dim, coord + 1, current, out);
  }
}

std::vector<double> support_probes(const SampleSpace& space) {
  switch (space.kind) {
    case SampleSpaceKind::kReal: {
      std::vector<double> probes;
      for (double z = -30.0; z <= 30.0; z += 3.7) probes.push_back(z);
      return probes;
    }
    case SampleSpaceKind::kBit:
      return {0.0, 1.0};
    case SampleSpaceKind::kSymbol: {
      std::vector<double> probes;
      for (int i = 0; i < space.alphabet_size; ++i) probes.push_back(i);
      return probes;
    }
  }
  return {};
}

}  // namespace

RegularityReport validate_regularity(const ModelFamily& family, int grid_points_per_dim) {
  RegularityReport report;
  report.family_id = family.id();
  const DomainBox& box = family.domain();

  // Condition 1 proxy: the box is a nonempty bounded set. DomainBox already
  // guarantees this at construction, so record the witness for the report.
  {
    RegularityCheck check{"domain-bounded-nonempty", true, ""};
    for (Eigen::Index i = 0; i < box.dimension(); ++i) {
      if (!std::isfinite(box.lo(i)) || !std::isfinite(box.hi(i)) || !(box.lo(i) < box.hi(i))) {
        check.pass = false;
        check.witness = "coordinate " + std::to_string(i);
      }
    }
    report.checks.push_back(check);
  }

  // Condition 7: a box is convex by construction.
  report.checks.push_back({"domain-convex", true, "box of intervals"});

  std::vector<Eigen::VectorXd> grid;
  {
    Eigen::VectorXd current(box.dimension());
    grid_points(box, grid_points_per_dim, 0, &current, &grid);
  }

  // Condition 3: the support (finiteness pattern of the log-density over a
  // probe set) must not depend on theta.
  {
    RegularityCheck check{"support-independent-of-theta", true, ""};
    const auto probes = support_probes(family.sample_space());
    std::vector<bool> reference;
    Eigen::VectorXd reference_theta;
    bool have_reference = false;
    for (const auto& theta : grid) {
      std::vector<bool> pattern;
      pattern.reserve(probes.size());
      for (double z : probes) {
        pattern.push_back(std::isfinite(family.log_density(ParameterVector(theta), z)));
      }
      if (!have_reference) {
        reference = pattern;
        reference_theta = theta;
        have_reference = true;
      } else if (pattern != reference) {
        check.pass = false;
        check.witness = "support differs between theta = " + format_theta(reference_theta) +
                        " and theta = " + format_theta(theta);
        break;
      }
    }
    report.checks.push_back(check);
  }

  // Condition 6d: Fisher information exists and is positive-definite at
  // every grid point over the box.
  {
    RegularityCheck check{"fisher-positive-definite", true, ""};
    for (const auto& theta : grid) {
      bool ok = true;
      try {
        const FisherMatrix info = family.fisher_information(ParameterVector(theta));
        const double max_eig = info.entries().cwiseAbs().maxCoeff();
        ok = info.min_eigenvalue() > 1e-12 * std::max(1.0, max_eig);
      } catch (const Error&) {
        ok = false;
      }
      if (!ok) {
        check.pass = false;
        check.witness = "theta = " + format_theta(theta);
        break;
      }
    }
    report.checks.push_back(check);
  }

  return report;
}

}  // namespace feedaudit
