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


#include "ssfl/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ssfl/error.hpp"

namespace ssfl {

namespace {

void require_dim(const Task& task, const Vec& w) {
  if (static_cast<std::size_t>(w.size()) != task.dim()) {
    throw DomainError("parameter dimension " + std::to_string(w.size()) + " != " +
                      std::to_string(task.dim()));
  }
}

void require_ue(const Task& task, std::size_t ue) {
  if (ue >= task.ues()) throw DomainError("UE index out of range");
}

void require_batch(std::size_t batch) {
  if (batch == 0) throw DomainError("empty batch");
}

Vec gaussian(std::size_t m, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec z(static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = normal(engine);
  return z;
}

Mat haar_orthogonal(std::size_t m, std::mt19937_64& engine) {
  Mat g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = normal(engine);
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(g.rows(), g.cols());
  const Vec diag = qr.matrixQR().diagonal();
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    if (diag[c] < 0.0) q.col(c) *= -1.0;
  }
  return q;
}

nlohmann::json to_json(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vec vec_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

nlohmann::json to_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(Vec(m.row(r).transpose())));
  return rows;
}

Mat mat_from_json(const nlohmann::json& j, Eigen::Index cols_if_empty = 0) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows == 0 ? cols_if_empty : static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw DomainError("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

std::string_view to_string(TaskKind kind) {
  return kind == TaskKind::kQuadratic ? "quadratic" : "classification";
}

std::string_view to_string(Objective objective) {
  return objective == Objective::kPfl ? "pfl" : "fl";
}

Objective parse_objective(std::string_view text) {
  if (text == "pfl") return Objective::kPfl;
  if (text == "fl") return Objective::kFl;
  throw DomainError("unknown objective: " + std::string(text));
}

std::optional<double> Task::heldout_loss(const Vec&, Objective, double) const {
  return std::nullopt;
}

std::optional<double> Task::accuracy(const Vec&, Objective, double) const {
  return std::nullopt;
}

std::unique_ptr<Task> task_from_snapshot(const nlohmann::json& snapshot) {
  const auto kind = snapshot.at("kind").get<std::string>();
  if (kind == "quadratic") {
    return std::make_unique<QuadraticTask>(QuadraticTask::from_snapshot(snapshot));
  }
  if (kind == "classification") {
    return std::make_unique<ClassificationTask>(ClassificationTask::from_snapshot(snapshot));
  }
  throw DomainError("unknown task kind in snapshot: " + kind);
}

// ---------------------------------------------------------------- quadratic

QuadraticTask QuadraticTask::generate(const Params& params, const CounterRng& rng) {
  if (params.dim == 0 || params.ues == 0) throw DomainError("quadratic task needs m, n >= 1");
  if (!(params.eig_min > 0.0) || params.eig_max < params.eig_min) {
    throw DomainError("eigenvalue range must satisfy 0 < eig_min <= eig_max");
  }
  auto centre_engine = rng.engine(Stream::kTask, 0);
  const Vec centre = params.theta_scale * gaussian(params.dim, centre_engine);
  std::vector<Mat> q;
  std::vector<Vec> theta;
  for (std::size_t i = 0; i < params.ues; ++i) {
    auto engine = rng.engine(Stream::kTask, 1, i);
    const Mat u = haar_orthogonal(params.dim, engine);
    std::uniform_real_distribution<double> eig(params.eig_min, params.eig_max);
    Vec lambda(static_cast<Eigen::Index>(params.dim));
    for (Eigen::Index j = 0; j < lambda.size(); ++j) lambda[j] = eig(engine);
    Mat qi = u * lambda.asDiagonal() * u.transpose();
    qi = 0.5 * (qi + qi.transpose());
    q.push_back(std::move(qi));
    theta.push_back(centre + params.theta_spread * gaussian(params.dim, engine));
  }
  return QuadraticTask(std::move(q), std::move(theta), params.sigma_G, params.sigma_H);
}

QuadraticTask::QuadraticTask(std::vector<Mat> q, std::vector<Vec> theta, double sigma_G,
                             double sigma_H)
    : q_(std::move(q)), theta_(std::move(theta)), sigma_G_(sigma_G), sigma_H_(sigma_H) {
  if (q_.empty() || q_.size() != theta_.size()) {
    throw DomainError("quadratic task needs one (Q, theta) pair per UE");
  }
  const Eigen::Index m = theta_.front().size();
  if (m == 0) throw DomainError("dimension must be >= 1");
  if (!(sigma_G_ >= 0.0) || !(sigma_H_ >= 0.0)) throw DomainError("noise levels must be >= 0");
  for (std::size_t i = 0; i < q_.size(); ++i) {
    const Mat& qi = q_[i];
    if (qi.rows() != m || qi.cols() != m || theta_[i].size() != m) {
      throw DomainError("quadratic task shapes disagree");
    }
    if (!qi.isApprox(qi.transpose(), 1e-12)) throw DomainError("Q must be symmetric");
    Eigen::LLT<Mat> llt(qi);
    if (llt.info() != Eigen::Success) throw DomainError("Q must be positive definite");
  }
}

double QuadraticTask::loss(std::size_t ue, const Vec& w) const {
  require_ue(*this, ue);
  require_dim(*this, w);
  const Vec d = w - theta_[ue];
  return 0.5 * d.dot(q_[ue] * d);
}

Vec QuadraticTask::grad(std::size_t ue, const Vec& w) const {
  require_ue(*this, ue);
  require_dim(*this, w);
  return q_[ue] * (w - theta_[ue]);
}

Vec QuadraticTask::hvp(std::size_t ue, const Vec&, const Vec& v) const {
  require_ue(*this, ue);
  require_dim(*this, v);
  return q_[ue] * v;
}

Vec QuadraticTask::sample_grad(std::size_t ue, const Vec& w, std::size_t batch,
                               std::mt19937_64& engine) const {
  require_batch(batch);
  Vec g = grad(ue, w);
  if (batch == kFullBatch || sigma_G_ == 0.0) return g;
  const double m = static_cast<double>(dim());
  const double sd = sigma_G_ / std::sqrt(m * static_cast<double>(batch));
  return g + sd * gaussian(dim(), engine);
}

Vec QuadraticTask::sample_hvp(std::size_t ue, const Vec& w, const Vec& v, std::size_t batch,
                              std::mt19937_64& engine) const {
  require_batch(batch);
  Vec hv = hvp(ue, w, v);
  if (batch == kFullBatch || sigma_H_ == 0.0) return hv;
  std::normal_distribution<double> normal(0.0, 1.0);
  const double z = normal(engine);
  return hv + (sigma_H_ / std::sqrt(static_cast<double>(batch))) * z * v;
}

nlohmann::json QuadraticTask::snapshot() const {
  nlohmann::json ues = nlohmann::json::array();
  for (std::size_t i = 0; i < q_.size(); ++i) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(q_[i]);
    ues.push_back({{"theta", to_json(theta_[i])},
                   {"Q", to_json(q_[i])},
                   {"eigenvalues", to_json(Vec(eig.eigenvalues()))}});
  }
  return {{"kind", "quadratic"},
          {"dim", dim()},
          {"sigma_G", sigma_G_},
          {"sigma_H", sigma_H_},
          {"ues", ues}};
}

QuadraticTask QuadraticTask::from_snapshot(const nlohmann::json& snapshot) {
  std::vector<Mat> q;
  std::vector<Vec> theta;
  for (const auto& ue : snapshot.at("ues")) {
    q.push_back(mat_from_json(ue.at("Q")));
    theta.push_back(vec_from_json(ue.at("theta")));
  }
  return QuadraticTask(std::move(q), std::move(theta), snapshot.at("sigma_G").get<double>(),
                       snapshot.at("sigma_H").get<double>());
}

double QuadraticTask::lipschitz() const {
  double l = 0.0;
  for (const Mat& qi : q_) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(qi, Eigen::EigenvaluesOnly);
    l = std::max(l, eig.eigenvalues().maxCoeff());
  }
  return l;
}

double QuadraticTask::hessian_diversity() const {
  Mat mean = Mat::Zero(q_.front().rows(), q_.front().cols());
  for (const Mat& qi : q_) mean += qi;
  mean /= static_cast<double>(q_.size());
  double out = 0.0;
  for (const Mat& qi : q_) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(qi - mean, Eigen::EigenvaluesOnly);
    out = std::max(out, eig.eigenvalues().cwiseAbs().maxCoeff());
  }
  return out;
}

// ---------------------------------------------------------------- partition

std::vector<std::vector<std::uint8_t>> Partition::label_matrix(std::size_t classes) const {
  std::vector<std::vector<std::uint8_t>> out(labels.size(),
                                             std::vector<std::uint8_t>(classes, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (int c : labels[i]) out[i].at(static_cast<std::size_t>(c)) = 1;
  }
  return out;
}

Partition make_noniid_partition(std::size_t n, std::size_t level, const CounterRng& rng,
                                std::size_t min_size, std::size_t max_size,
                                std::size_t classes) {
  if (level < 1 || level > classes) {
    throw DomainError("label level must lie in [1, " + std::to_string(classes) + "]");
  }
  if (min_size < level || max_size < min_size) {
    throw DomainError("sample size range must satisfy level <= min_size <= max_size");
  }
  Partition out;
  for (std::size_t i = 0; i < n; ++i) {
    auto engine = rng.engine(Stream::kPartition, i);
    std::vector<int> all(classes);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), engine);
    std::vector<int> held(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(level));
    std::sort(held.begin(), held.end());
    std::uniform_int_distribution<std::size_t> size(min_size, max_size);
    out.labels.push_back(std::move(held));
    out.sizes.push_back(size(engine));
  }
  return out;
}

// ----------------------------------------------------------- classification

ClassificationTask ClassificationTask::generate(const Params& params, const CounterRng& rng) {
  if (params.ues == 0 || params.classes < 2 || params.features == 0) {
    throw DomainError("classification task needs n >= 1, >= 2 classes and >= 1 feature");
  }
  if (params.test_per_ue < params.level) throw DomainError("test_per_ue must be >= level");
  const Partition part = make_noniid_partition(params.ues, params.level, rng, params.min_size,
                                               params.max_size, params.classes);
  const auto d = static_cast<Eigen::Index>(params.features);
  auto mean_engine = rng.engine(Stream::kTask, 0);
  Mat means(static_cast<Eigen::Index>(params.classes), d);
  {
    std::normal_distribution<double> normal(0.0, params.class_separation);
    for (Eigen::Index c = 0; c < means.rows(); ++c) {
      for (Eigen::Index j = 0; j < d; ++j) means(c, j) = normal(mean_engine);
    }
  }
  auto make_shard = [&](const std::vector<int>& labels, std::size_t count,
                        std::mt19937_64& engine) {
    Shard s;
    s.x.resize(static_cast<Eigen::Index>(count), d + 1);
    s.y.resize(count);
    std::normal_distribution<double> normal(0.0, params.feature_noise);
    for (std::size_t r = 0; r < count; ++r) {
      const int label = labels[r % labels.size()];
      s.y[r] = label;
      const auto row = static_cast<Eigen::Index>(r);
      for (Eigen::Index j = 0; j < d; ++j) s.x(row, j) = means(label, j) + normal(engine);
      s.x(row, d) = 1.0;
    }
    return s;
  };
  std::vector<Shard> train;
  std::vector<Shard> test;
  for (std::size_t i = 0; i < params.ues; ++i) {
    auto train_engine = rng.engine(Stream::kTask, 1, i);
    auto test_engine = rng.engine(Stream::kTask, 2, i);
    train.push_back(make_shard(part.labels[i], part.sizes[i], train_engine));
    test.push_back(make_shard(part.labels[i], params.test_per_ue, test_engine));
  }
  return ClassificationTask(params.classes, std::move(train), std::move(test));
}

ClassificationTask::ClassificationTask(std::size_t classes, std::vector<Shard> train,
                                       std::vector<Shard> test)
    : classes_(classes), cols_(0), train_(std::move(train)), test_(std::move(test)) {
  if (train_.empty() || train_.size() != test_.size()) {
    throw DomainError("classification task needs one train and one test shard per UE");
  }
  cols_ = static_cast<std::size_t>(train_.front().x.cols());
  for (const auto* shards : {&train_, &test_}) {
    for (const Shard& s : *shards) {
      if (static_cast<std::size_t>(s.x.cols()) != cols_ ||
          static_cast<std::size_t>(s.x.rows()) != s.y.size() || s.y.empty()) {
        throw DomainError("classification shard shapes disagree");
      }
      for (int y : s.y) {
        if (y < 0 || static_cast<std::size_t>(y) >= classes_) throw DomainError("label out of range");
      }
    }
  }
}

double ClassificationTask::shard_loss(const Shard& shard, const Vec& w) const {
  require_dim(*this, w);
  const Eigen::Map<const RowMat> wm(w.data(), static_cast<Eigen::Index>(classes_),
                                    static_cast<Eigen::Index>(cols_));
  const Mat z = shard.x * wm.transpose();
  double total = 0.0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double mx = z.row(r).maxCoeff();
    const double lse = mx + std::log((z.row(r).array() - mx).exp().sum());
    total += lse - z(r, shard.y[static_cast<std::size_t>(r)]);
  }
  return total / static_cast<double>(z.rows());
}

namespace {

Mat softmax_rows(const Mat& z) {
  Mat p(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double mx = z.row(r).maxCoeff();
    p.row(r) = (z.row(r).array() - mx).exp();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

Vec flatten_row_major(const Mat& m) {
  Vec out(m.size());
  Eigen::Map<RowMat>(out.data(), m.rows(), m.cols()) = m;
  return out;
}

}  // namespace

Vec ClassificationTask::shard_grad(const Shard& shard, const Vec& w) const {
  require_dim(*this, w);
  const Eigen::Map<const RowMat> wm(w.data(), static_cast<Eigen::Index>(classes_),
                                    static_cast<Eigen::Index>(cols_));
  Mat p = softmax_rows(shard.x * wm.transpose());
  for (Eigen::Index r = 0; r < p.rows(); ++r) p(r, shard.y[static_cast<std::size_t>(r)]) -= 1.0;
  const Mat g = p.transpose() * shard.x / static_cast<double>(p.rows());
  return flatten_row_major(g);
}

Vec ClassificationTask::shard_hvp(const Shard& shard, const Vec& w, const Vec& v) const {
  require_dim(*this, w);
  require_dim(*this, v);
  const auto c = static_cast<Eigen::Index>(classes_);
  const auto k = static_cast<Eigen::Index>(cols_);
  const Eigen::Map<const RowMat> wm(w.data(), c, k);
  const Eigen::Map<const RowMat> vm(v.data(), c, k);
  const Mat p = softmax_rows(shard.x * wm.transpose());
  const Mat u = shard.x * vm.transpose();
  // (diag(p) - p p^T) u per sample
  const Mat pu = p.cwiseProduct(u);
  const Vec dot = pu.rowwise().sum();
  const Mat s = pu - p.cwiseProduct(dot.replicate(1, c));
  const Mat h = s.transpose() * shard.x / static_cast<double>(p.rows());
  return flatten_row_major(h);
}

ClassificationTask::Shard ClassificationTask::subsample(const Shard& shard, std::size_t batch,
                                                        std::mt19937_64& engine) const {
  const std::size_t n = shard.y.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t j = 0; j < batch; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, n - 1);
    std::swap(idx[j], idx[pick(engine)]);
  }
  Shard out;
  out.x.resize(static_cast<Eigen::Index>(batch), shard.x.cols());
  out.y.resize(batch);
  for (std::size_t j = 0; j < batch; ++j) {
    out.x.row(static_cast<Eigen::Index>(j)) = shard.x.row(static_cast<Eigen::Index>(idx[j]));
    out.y[j] = shard.y[idx[j]];
  }
  return out;
}

double ClassificationTask::loss(std::size_t ue, const Vec& w) const {
  require_ue(*this, ue);
  return shard_loss(train_[ue], w);
}

Vec ClassificationTask::grad(std::size_t ue, const Vec& w) const {
  require_ue(*this, ue);
  return shard_grad(train_[ue], w);
}

Vec ClassificationTask::hvp(std::size_t ue, const Vec& w, const Vec& v) const {
  require_ue(*this, ue);
  return shard_hvp(train_[ue], w, v);
}

Vec ClassificationTask::sample_grad(std::size_t ue, const Vec& w, std::size_t batch,
                                    std::mt19937_64& engine) const {
  require_batch(batch);
  require_ue(*this, ue);
  if (batch >= train_[ue].y.size()) return shard_grad(train_[ue], w);
  return shard_grad(subsample(train_[ue], batch, engine), w);
}

Vec ClassificationTask::sample_hvp(std::size_t ue, const Vec& w, const Vec& v,
                                   std::size_t batch, std::mt19937_64& engine) const {
  require_batch(batch);
  require_ue(*this, ue);
  if (batch >= train_[ue].y.size()) return shard_hvp(train_[ue], w, v);
  return shard_hvp(subsample(train_[ue], batch, engine), w, v);
}

std::optional<double> ClassificationTask::heldout_loss(const Vec& w, Objective objective,
                                                       double alpha) const {
  double total = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < ues(); ++i) {
    const Vec wi = objective == Objective::kPfl ? Vec(w - alpha * grad(i, w)) : w;
    const double n = static_cast<double>(test_[i].y.size());
    total += n * shard_loss(test_[i], wi);
    count += n;
  }
  return total / count;
}

std::optional<double> ClassificationTask::accuracy(const Vec& w, Objective objective,
                                                   double alpha) const {
  std::size_t correct = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < ues(); ++i) {
    const Vec wi = objective == Objective::kPfl ? Vec(w - alpha * grad(i, w)) : w;
    const Eigen::Map<const RowMat> wm(wi.data(), static_cast<Eigen::Index>(classes_),
                                      static_cast<Eigen::Index>(cols_));
    const Mat z = test_[i].x * wm.transpose();
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      Eigen::Index arg = 0;
      z.row(r).maxCoeff(&arg);
      correct += static_cast<int>(arg) == test_[i].y[static_cast<std::size_t>(r)];
      ++count;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(count);
}

nlohmann::json ClassificationTask::snapshot() const {
  auto shard_json = [](const Shard& s) {
    return nlohmann::json{{"x", to_json(s.x)}, {"y", s.y}};
  };
  nlohmann::json train = nlohmann::json::array();
  nlohmann::json test = nlohmann::json::array();
  for (const Shard& s : train_) train.push_back(shard_json(s));
  for (const Shard& s : test_) test.push_back(shard_json(s));
  return {{"kind", "classification"}, {"classes", classes_}, {"train", train}, {"test", test}};
}

ClassificationTask ClassificationTask::from_snapshot(const nlohmann::json& snapshot) {
  auto read = [](const nlohmann::json& arr) {
    std::vector<Shard> out;
    for (const auto& j : arr) {
      Shard s;
      s.x = mat_from_json(j.at("x"));
      s.y = j.at("y").get<std::vector<int>>();
      out.push_back(std::move(s));
    }
    return out;
  };
  return ClassificationTask(snapshot.at("classes").get<std::size_t>(), read(snapshot.at("train")),
                            read(snapshot.at("test")));
}

// ---------------------------------------------------------------- meta math

double local_loss(const Task& task, std::size_t ue, const Vec& w) {
  return task.loss(ue, w);
}

double meta_loss_exact(const Task& task, std::size_t ue, const Vec& w, double alpha) {
  if (alpha < 0.0) throw DomainError("alpha must be non-negative");
  return task.loss(ue, w - alpha * task.grad(ue, w));
}

Vec meta_grad_exact(const Task& task, std::size_t ue, const Vec& w, double alpha) {
  if (alpha < 0.0) throw DomainError("alpha must be non-negative");
  const Vec adapted = w - alpha * task.grad(ue, w);
  const Vec outer = task.grad(ue, adapted);
  if (alpha == 0.0) return outer;
  return outer - alpha * task.hvp(ue, w, outer);
}

Vec meta_grad_stochastic(const Task& task, std::size_t ue, const Vec& w, double alpha,
                         const BatchSizes& batches, std::mt19937_64& engine) {
  if (alpha < 0.0) throw DomainError("alpha must be non-negative");
  require_batch(batches.inner);
  require_batch(batches.outer);
  require_batch(batches.hessian);
  if (alpha == 0.0) return task.sample_grad(ue, w, batches.outer, engine);
  const Vec adapted = w - alpha * task.sample_grad(ue, w, batches.inner, engine);
  const Vec outer = task.sample_grad(ue, adapted, batches.outer, engine);
  return outer - alpha * task.sample_hvp(ue, w, outer, batches.hessian, engine);
}

Vec fl_grad(const Task& task, std::size_t ue, const Vec& w, std::size_t batch,
            std::mt19937_64& engine) {
  require_batch(batch);
  return task.sample_grad(ue, w, batch, engine);
}

double objective_value(const Task& task, const Vec& w, Objective objective, double alpha) {
  double total = 0.0;
  for (std::size_t i = 0; i < task.ues(); ++i) {
    total += objective == Objective::kPfl ? meta_loss_exact(task, i, w, alpha)
                                          : local_loss(task, i, w);
  }
  return total / static_cast<double>(task.ues());
}

Vec objective_grad(const Task& task, const Vec& w, Objective objective, double alpha) {
  Vec total = Vec::Zero(static_cast<Eigen::Index>(task.dim()));
  for (std::size_t i = 0; i < task.ues(); ++i) {
    total += objective == Objective::kPfl ? meta_grad_exact(task, i, w, alpha) : task.grad(i, w);
  }
  return total / static_cast<double>(task.ues());
}

Vec global_update(const Vec& w, std::span<const GradientUpdate> updates, double beta,
                  std::size_t participants) {
  if (updates.size() != participants) {
    throw ProtocolError("expected " + std::to_string(participants) + " updates, got " +
                        std::to_string(updates.size()));
  }
  Vec sum = Vec::Zero(w.size());
  for (const GradientUpdate& u : updates) {
    if (u.grad.size() != w.size()) throw DomainError("update dimension mismatch");
    sum += u.grad;
  }
  return w - (beta / static_cast<double>(participants)) * sum;
}

MetaOptimum meta_objective_minimizer(const Task& task, double alpha) {
  const auto* quad = dynamic_cast<const QuadraticTask*>(&task);
  if (quad == nullptr) throw DomainError("closed-form minimizer needs a quadratic task");
  const auto m = static_cast<Eigen::Index>(quad->dim());
  Mat lhs = Mat::Zero(m, m);
  Vec rhs = Vec::Zero(m);
  std::vector<Mat> h(quad->ues());
  for (std::size_t i = 0; i < quad->ues(); ++i) {
    const Mat& q = quad->hessian(i);
    const Mat mi = Mat::Identity(m, m) - alpha * q;
    h[i] = mi * q * mi;
    lhs += h[i];
    rhs += h[i] * quad->optimum(i);
  }
  Eigen::LDLT<Mat> ldlt(lhs);
  const Vec d = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-14 * std::max(1.0, d.maxCoeff())) {
    throw DegenerateError("meta-objective normal equations are singular");
  }
  MetaOptimum out;
  out.w = ldlt.solve(rhs);
  double value = 0.0;
  for (std::size_t i = 0; i < quad->ues(); ++i) {
    const Vec diff = out.w - quad->optimum(i);
    value += 0.5 * diff.dot(h[i] * diff);
  }
  out.value = value / static_cast<double>(quad->ues());
  return out;
}

}  // namespace ssfl
