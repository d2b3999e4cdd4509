// Copyright 2026 The ssfl Authors
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


// Tasks and one-step meta-learning math: local losses, exact and stochastic
// meta-gradients, plain FL gradients, global aggregation and label-skewed
// synthetic data.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "ssfl/rng.hpp"

namespace ssfl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Batch size meaning "the whole local dataset, no sampling noise".
inline constexpr std::size_t kFullBatch = std::numeric_limits<std::size_t>::max();

struct BatchSizes {
  std::size_t inner = kFullBatch;    // D_in
  std::size_t outer = kFullBatch;    // D_o
  std::size_t hessian = kFullBatch;  // D_h

  bool operator==(const BatchSizes&) const = default;
};

enum class TaskKind { kQuadratic, kClassification };
enum class Objective { kPfl, kFl };

std::string_view to_string(TaskKind kind);
std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view text);

class Task {
 public:
  virtual ~Task() = default;

  virtual TaskKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t ues() const = 0;

  // Exact (full local dataset) quantities.
  virtual double loss(std::size_t ue, const Vec& w) const = 0;
  virtual Vec grad(std::size_t ue, const Vec& w) const = 0;
  virtual Vec hvp(std::size_t ue, const Vec& w, const Vec& v) const = 0;

  // Minibatch estimates. `batch` == 0 throws DomainError; kFullBatch (or any
  // size covering the dataset) returns the exact value.
  virtual Vec sample_grad(std::size_t ue, const Vec& w, std::size_t batch,
                          std::mt19937_64& engine) const = 0;
  virtual Vec sample_hvp(std::size_t ue, const Vec& w, const Vec& v, std::size_t batch,
                         std::mt19937_64& engine) const = 0;

  // Held-out metrics; empty for tasks without test data.
  virtual std::optional<double> heldout_loss(const Vec& w, Objective objective,
                                             double alpha) const;
  virtual std::optional<double> accuracy(const Vec& w, Objective objective,
                                         double alpha) const;

  virtual nlohmann::json snapshot() const = 0;
};

std::unique_ptr<Task> task_from_snapshot(const nlohmann::json& snapshot);

// f_i(w) = 1/2 (w - theta_i)^T Q_i (w - theta_i). Stochastic gradients add
// N(0, sigma_G^2 / (m D) I); stochastic Hessians add sigma_H / sqrt(D) * z * I
// with z ~ N(0, 1), so both per-sample variances are exactly sigma^2.
class QuadraticTask final : public Task {
 public:
  struct Params {
    std::size_t dim = 16;
    std::size_t ues = 20;
    double eig_min = 0.5;
    double eig_max = 2.0;
    double theta_scale = 1.0;   // std of the common centre
    double theta_spread = 1.0;  // std of per-UE deviations from the centre
    double sigma_G = 0.0;
    double sigma_H = 0.0;

    bool operator==(const Params&) const = default;
  };

  // Q_i = U_i diag(lambda_i) U_i^T with U_i Haar-orthogonal, lambda_i uniform
  // on [eig_min, eig_max].
  static QuadraticTask generate(const Params& params, const CounterRng& rng);

  // Throws DomainError unless every Q_i is symmetric positive definite and
  // shapes agree.
  QuadraticTask(std::vector<Mat> q, std::vector<Vec> theta, double sigma_G = 0.0,
                double sigma_H = 0.0);

  TaskKind kind() const override { return TaskKind::kQuadratic; }
  std::size_t dim() const override { return static_cast<std::size_t>(theta_.front().size()); }
  std::size_t ues() const override { return theta_.size(); }
  double loss(std::size_t ue, const Vec& w) const override;
  Vec grad(std::size_t ue, const Vec& w) const override;
  Vec hvp(std::size_t ue, const Vec& w, const Vec& v) const override;
  Vec sample_grad(std::size_t ue, const Vec& w, std::size_t batch,
                  std::mt19937_64& engine) const override;
  Vec sample_hvp(std::size_t ue, const Vec& w, const Vec& v, std::size_t batch,
                 std::mt19937_64& engine) const override;
  nlohmann::json snapshot() const override;
  static QuadraticTask from_snapshot(const nlohmann::json& snapshot);

  const Mat& hessian(std::size_t ue) const { return q_.at(ue); }
  const Vec& optimum(std::size_t ue) const { return theta_.at(ue); }
  double sigma_G() const noexcept { return sigma_G_; }
  double sigma_H() const noexcept { return sigma_H_; }

  // Largest eigenvalue over all Q_i (gradient Lipschitz constant).
  double lipschitz() const;
  // max_i ||Q_i - mean Q||_2
  double hessian_diversity() const;

 private:
  std::vector<Mat> q_;
  std::vector<Vec> theta_;
  double sigma_G_;
  double sigma_H_;
};

struct Partition {
  std::vector<std::vector<int>> labels;  // sorted, exactly l per UE
  std::vector<std::size_t> sizes;        // training samples per UE

  // n x classes 0/1 matrix of held labels.
  std::vector<std::vector<std::uint8_t>> label_matrix(std::size_t classes = 10) const;
};

// Every UE holds exactly `level` of `classes` labels; sizes uniform on
// [min_size, max_size]. Throws DomainError unless 1 <= level <= classes.
Partition make_noniid_partition(std::size_t n, std::size_t level, const CounterRng& rng,
                                std::size_t min_size = 40, std::size_t max_size = 120,
                                std::size_t classes = 10);

// Linear softmax model over per-class Gaussian features. Parameters are the
// row-major classes x (features + 1) weight matrix, bias in the last column.
class ClassificationTask final : public Task {
 public:
  struct Params {
    std::size_t ues = 20;
    std::size_t classes = 10;
    std::size_t features = 8;
    std::size_t level = 2;
    std::size_t min_size = 40;
    std::size_t max_size = 120;
    std::size_t test_per_ue = 50;
    double class_separation = 1.5;  // std of class means
    double feature_noise = 1.0;

    bool operator==(const Params&) const = default;
  };

  struct Shard {
    Mat x;                  // N x (features + 1), last column all ones
    std::vector<int> y;
  };

  static ClassificationTask generate(const Params& params, const CounterRng& rng);
  ClassificationTask(std::size_t classes, std::vector<Shard> train, std::vector<Shard> test);

  TaskKind kind() const override { return TaskKind::kClassification; }
  std::size_t dim() const override { return classes_ * cols_; }
  std::size_t ues() const override { return train_.size(); }
  double loss(std::size_t ue, const Vec& w) const override;
  Vec grad(std::size_t ue, const Vec& w) const override;
  Vec hvp(std::size_t ue, const Vec& w, const Vec& v) const override;
  Vec sample_grad(std::size_t ue, const Vec& w, std::size_t batch,
                  std::mt19937_64& engine) const override;
  Vec sample_hvp(std::size_t ue, const Vec& w, const Vec& v, std::size_t batch,
                 std::mt19937_64& engine) const override;
  std::optional<double> heldout_loss(const Vec& w, Objective objective,
                                     double alpha) const override;
  std::optional<double> accuracy(const Vec& w, Objective objective,
                                 double alpha) const override;
  nlohmann::json snapshot() const override;
  static ClassificationTask from_snapshot(const nlohmann::json& snapshot);

  const Shard& train(std::size_t ue) const { return train_.at(ue); }
  const Shard& test(std::size_t ue) const { return test_.at(ue); }
  std::size_t classes() const noexcept { return classes_; }

  // Same math on an arbitrary sample set (used by the public methods).
  double shard_loss(const Shard& shard, const Vec& w) const;
  Vec shard_grad(const Shard& shard, const Vec& w) const;
  Vec shard_hvp(const Shard& shard, const Vec& w, const Vec& v) const;

 private:
  Shard subsample(const Shard& shard, std::size_t batch, std::mt19937_64& engine) const;

  std::size_t classes_;
  std::size_t cols_;
  std::vector<Shard> train_;
  std::vector<Shard> test_;
};

// f_i(w)
double local_loss(const Task& task, std::size_t ue, const Vec& w);
// F_i(w) = f_i(w - alpha grad f_i(w))
double meta_loss_exact(const Task& task, std::size_t ue, const Vec& w, double alpha);
// (I - alpha hess f_i(w)) grad f_i(w - alpha grad f_i(w))
Vec meta_grad_exact(const Task& task, std::size_t ue, const Vec& w, double alpha);
// Same with independent minibatches for the inner gradient, the outer
// gradient and the Hessian-vector product.
Vec meta_grad_stochastic(const Task& task, std::size_t ue, const Vec& w, double alpha,
                         const BatchSizes& batches, std::mt19937_64& engine);
Vec fl_grad(const Task& task, std::size_t ue, const Vec& w, std::size_t batch,
            std::mt19937_64& engine);

// Mean over UEs of the per-UE objective (meta loss for PFL, local loss for FL)
// and its gradient.
double objective_value(const Task& task, const Vec& w, Objective objective, double alpha);
Vec objective_grad(const Task& task, const Vec& w, Objective objective, double alpha);

struct GradientUpdate {
  std::size_t ue = 0;
  std::size_t model_version = 0;
  Vec grad;
};

// w - (beta / A) * sum of grads, summed in the given order. Throws
// ProtocolError unless exactly A updates are given.
Vec global_update(const Vec& w, std::span<const GradientUpdate> updates, double beta,
                  std::size_t participants);

struct MetaOptimum {
  Vec w;
  double value = 0.0;
};

// Exact minimizer of the mean meta objective; quadratic tasks only
// (DomainError otherwise). Throws DegenerateError on a singular system.
MetaOptimum meta_objective_minimizer(const Task& task, double alpha);

}  // namespace ssfl
