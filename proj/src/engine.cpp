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


#include "ssfl/engine.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <thread>

#include "ssfl/error.hpp"

namespace ssfl {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

enum class Phase { kComputing, kTransmitting, kWaiting };

struct UEState {
  std::size_t version = 0;
  Phase phase = Phase::kComputing;
  double compute_done_s = 0.0;
  double remaining = 0.0;
  double carried = 0.0;
  double rate = 0.0;
  bool discard = false;  // finish-mode: server drops this upload
  Vec grad;
};

struct Arrival {
  std::size_t ue = 0;
  std::size_t version = 0;
  Vec grad;
};

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t j = 0; j < count; ++j) body(j);
    return;
  }
  const std::size_t threads = std::min(workers, count);
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t j = t; j < count; j += threads) body(j);
    });
  }
}

class Simulator {
 public:
  Simulator(const RunConfig& config, const Task& task, std::span<const UEProfile> profiles,
            const ChannelParams& channel, const Vec& w0)
      : cfg_(config),
        task_(task),
        profiles_(profiles),
        channel_(channel),
        rng_(config.seed),
        n_(profiles.size()),
        w_(w0),
        states_(profiles.size()) {
    enforce_ = cfg_.enforce_staleness.value_or(cfg_.mode != Mode::kAsync);
    flag_staleness_ = cfg_.mode != Mode::kAsync || enforce_;
    if (cfg_.mode == Mode::kSemiSync) {
      if (cfg_.schedule) {
        schedule_ = *cfg_.schedule;
      } else {
        std::vector<double> eta(n_);
        for (std::size_t i = 0; i < n_; ++i) eta[i] = profiles_[i].eta;
        schedule_ = greedy_schedule(eta, cfg_.A, cfg_.K, cfg_.S);
      }
    } else if (cfg_.mode == Mode::kSync) {
      schedule_ = SchedulingMatrix(cfg_.K, n_, n_, cfg_.S,
                                   std::vector<std::uint8_t>(cfg_.K * n_, 1));
    }

    trace_.mode = cfg_.mode;
    trace_.objective = cfg_.objective;
    trace_.A = cfg_.A;
    trace_.S = cfg_.S;
    const auto rows = static_cast<Eigen::Index>(cfg_.K);
    const auto cols = static_cast<Eigen::Index>(n_);
    trace_.plan.policy = cfg_.policy;
    trace_.plan.shares_hz = Mat::Zero(rows, cols);
    trace_.ledger.payload = Mat::Zero(rows, cols);
    trace_.ledger.total_payload = cfg_.payload;
    trace_.busy_time_s.assign(n_, 0.0);
  }

  SimTrace run() {
    if (schedule_ && cfg_.mode == Mode::kSemiSync) {
      for (const auto& v : check_staleness(*schedule_, cfg_.S)) {
        trace_.flags.push_back("schedule: UE " + std::to_string(v.ue) + " idle for more than S rounds from round " +
                               std::to_string(v.window_start));
      }
    }
    evaluate_initial();
    std::vector<std::size_t> everyone(n_);
    for (std::size_t i = 0; i < n_; ++i) everyone[i] = i;
    distribute(everyone);
    start_round();

    while (round_ < cfg_.K) {
      if (buffer_.size() >= cfg_.A) {
        close_round();
        continue;
      }
      double next = kNever;
      std::size_t who = n_;
      for (std::size_t i = 0; i < n_; ++i) {
        const double at = event_time(i);
        if (at < next) {
          next = at;
          who = i;
        }
      }
      if (who == n_) {
        throw InfeasibleError("no UE can make progress in round " + std::to_string(round_));
      }
      advance(next);
      handle_event(who);
    }
    audit();
    trace_.final_model = w_;
    return std::move(trace_);
  }

 private:
  double event_time(std::size_t i) const {
    const UEState& s = states_[i];
    switch (s.phase) {
      case Phase::kComputing: return s.compute_done_s;
      case Phase::kTransmitting:
        if (s.remaining <= 0.0) return now_;
        return s.rate > 0.0 ? now_ + s.remaining / s.rate : kNever;
      case Phase::kWaiting: return kNever;
    }
    return kNever;
  }

  void advance(double to) {
    const double dt = to - now_;
    const auto k = static_cast<Eigen::Index>(round_);
    for (std::size_t i = 0; i < n_; ++i) {
      UEState& s = states_[i];
      if (s.phase == Phase::kComputing) {
        trace_.busy_time_s[i] += dt;
      } else if (s.phase == Phase::kTransmitting && s.rate > 0.0 && s.remaining > 0.0) {
        // Uploads finishing exactly now send their exact remainder.
        const double sent =
            event_time(i) <= to ? s.remaining : std::min(s.remaining, s.rate * dt);
        s.remaining = event_time(i) <= to ? 0.0 : s.remaining - sent;
        s.carried += sent;
        trace_.ledger.payload(k, static_cast<Eigen::Index>(i)) += sent;
        trace_.busy_time_s[i] += dt;
      }
    }
    now_ = to;
  }

  void handle_event(std::size_t i) {
    UEState& s = states_[i];
    if (s.phase == Phase::kComputing) {
      s.phase = Phase::kTransmitting;
      s.remaining = cfg_.payload;
      s.carried = 0.0;
      return;
    }
    trace_.ledger.uploads.push_back({i, round_, now_, true, s.carried});
    if (s.discard) {
      restart({i});
      return;
    }
    s.phase = Phase::kWaiting;
    buffer_.push_back({i, s.version, std::move(s.grad)});
  }

  void close_round() {
    std::vector<GradientUpdate> updates;
    updates.reserve(cfg_.A);
    for (std::size_t j = 0; j < cfg_.A; ++j) {
      Arrival& a = buffer_.front();
      updates.push_back({a.ue, a.version, std::move(a.grad)});
      buffer_.pop_front();
    }
    std::sort(updates.begin(), updates.end(),
              [](const GradientUpdate& a, const GradientUpdate& b) { return a.ue < b.ue; });

    RoundRecord rec;
    rec.round = round_;
    rec.close_time_s = now_;
    for (const GradientUpdate& u : updates) {
      const std::size_t tau = round_ - u.model_version;
      rec.participants.push_back(u.ue);
      rec.staleness.push_back(tau);
      if (flag_staleness_ && tau > cfg_.S) {
        trace_.flags.push_back("staleness: round " + std::to_string(round_) + " UE " +
                               std::to_string(u.ue) + " tau=" + std::to_string(tau) + " > S");
      }
    }
    w_ = global_update(w_, updates, cfg_.beta, cfg_.A);
    if (cfg_.keep_models) trace_.models.push_back(w_);
    evaluate(rec);
    trace_.rounds.push_back(std::move(rec));

    std::vector<std::size_t> fresh;
    for (const GradientUpdate& u : updates) fresh.push_back(u.ue);
    std::vector<std::size_t> stale;
    if (enforce_) {
      for (std::size_t i = 0; i < n_; ++i) {
        if (std::ranges::find(fresh, i) != fresh.end()) continue;
        if (round_ - states_[i].version > cfg_.S) stale.push_back(i);
      }
    }
    ++round_;

    std::vector<std::size_t> restart_now = fresh;
    for (std::size_t i : stale) {
      ++trace_.redistributions;
      UEState& s = states_[i];
      if (s.phase == Phase::kWaiting) {
        std::erase_if(buffer_, [i](const Arrival& a) { return a.ue == i; });
        restart_now.push_back(i);
      } else if (cfg_.redistribution == Redistribution::kFinish) {
        s.discard = true;
      } else {
        if (s.phase == Phase::kTransmitting) {
          trace_.ledger.uploads.push_back({i, round_ - 1, now_, false, s.carried});
          ++trace_.abandoned_uploads;
        }
        restart_now.push_back(i);
      }
    }
    std::sort(restart_now.begin(), restart_now.end());
    restart(restart_now);
    if (round_ < cfg_.K) start_round();
  }

  void restart(const std::vector<std::size_t>& ues) { distribute(ues); }

  // Hands the current model to `ues` and computes their gradients.
  void distribute(const std::vector<std::size_t>& ues) {
    for (std::size_t i : ues) {
      UEState& s = states_[i];
      s.version = round_;
      s.phase = Phase::kComputing;
      s.compute_done_s = now_ + compute_delay(profiles_[i]);
      s.remaining = 0.0;
      s.carried = 0.0;
      s.discard = false;
    }
    parallel_for(ues.size(), cfg_.workers, [&](std::size_t j) {
      const std::size_t i = ues[j];
      auto engine = rng_.engine(Stream::kGradient, i, states_[i].version);
      states_[i].grad = cfg_.objective == Objective::kPfl
                            ? meta_grad_stochastic(task_, i, w_, cfg_.alpha, cfg_.batches, engine)
                            : fl_grad(task_, i, w_, cfg_.batches.outer, engine);
    });
  }

  void start_round() {
    const auto h = draw_round(rng_, round_, profiles_, channel_);
    std::vector<std::uint8_t> none(n_, 0);
    const auto row = schedule_ ? schedule_->row(round_) : std::span<const std::uint8_t>(none);
    const auto shares = allocate_round(cfg_.policy, row, profiles_, h, channel_, cfg_.theta);
    const auto k = static_cast<Eigen::Index>(round_);
    for (std::size_t i = 0; i < n_; ++i) {
      if (cfg_.policy == BandwidthPolicy::kActiveExtreme && row[i] && !(shares[i] > 0.0)) {
        throw ConfigError("protocol.bandwidth_policy",
                          "scheduled UE " + std::to_string(i) + " has no bandwidth");
      }
      trace_.plan.shares_hz(k, static_cast<Eigen::Index>(i)) = shares[i];
      states_[i].rate = shares[i] > 0.0 ? uplink_rate(shares[i], profiles_[i], h[i], channel_) : 0.0;
    }
  }

  void evaluate_initial() {
    RoundRecord rec;
    evaluate(rec);
    trace_.initial_loss = rec.loss;
    trace_.initial_grad_norm_sq = rec.grad_norm_sq;
    trace_.initial_accuracy = rec.accuracy;
  }

  void evaluate(RoundRecord& rec) const {
    const auto held = task_.heldout_loss(w_, cfg_.objective, cfg_.alpha);
    rec.loss = held ? *held : objective_value(task_, w_, cfg_.objective, cfg_.alpha);
    rec.grad_norm_sq = objective_grad(task_, w_, cfg_.objective, cfg_.alpha).squaredNorm();
    rec.accuracy = task_.accuracy(w_, cfg_.objective, cfg_.alpha);
  }

  void audit() {
    SchedulingMatrix audited = [&] {
      if (cfg_.policy == BandwidthPolicy::kActiveExtreme && schedule_) return *schedule_;
      std::vector<std::uint8_t> cells(cfg_.K * n_, 0);
      for (const RoundRecord& r : trace_.rounds) {
        for (std::size_t i : r.participants) cells[r.round * n_ + i] = 1;
      }
      return SchedulingMatrix(cfg_.K, n_, cfg_.A, std::max<std::size_t>(cfg_.S, 1), std::move(cells));
    }();
    const auto report = verify_plan(trace_.plan, trace_.ledger, audited, channel_);
    for (const PlanViolation& v : report.violations) {
      if (v.kind == PlanViolationKind::kUnequalFinish) continue;
      trace_.flags.push_back("plan: " + std::string(to_string(v.kind)) + " round " +
                             std::to_string(v.round) + " UE " + std::to_string(v.ue));
    }
  }

  RunConfig cfg_;
  const Task& task_;
  std::span<const UEProfile> profiles_;
  const ChannelParams& channel_;
  CounterRng rng_;
  std::size_t n_;
  Vec w_;
  std::vector<UEState> states_;
  std::deque<Arrival> buffer_;
  std::optional<SchedulingMatrix> schedule_;
  SimTrace trace_;
  std::size_t round_ = 0;
  double now_ = 0.0;
  bool enforce_ = true;
  bool flag_staleness_ = true;
};

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kSemiSync: return "semi";
    case Mode::kSync: return "sync";
    case Mode::kAsync: return "async";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "semi" || text == "semi-sync") return Mode::kSemiSync;
  if (text == "sync") return Mode::kSync;
  if (text == "async") return Mode::kAsync;
  throw DomainError("unknown mode: " + std::string(text));
}

RunConfig RunConfig::normalized(std::size_t n) const {
  RunConfig out = *this;
  if (mode == Mode::kSemiSync) return out;
  out.A = mode == Mode::kSync ? n : 1;
  if (policy != BandwidthPolicy::kFixedEqual) out.policy = BandwidthPolicy::kAllShareExtreme;
  out.schedule.reset();
  return out;
}

void RunConfig::validate(std::size_t n) const {
  if (n == 0) throw ConfigError("population", "needs at least one UE");
  if (A < 1 || A > n) throw ConfigError("protocol.A", "must lie in [1, n]");
  if (S < 1) throw ConfigError("protocol.S", "must be >= 1");
  if (K < 1) throw ConfigError("protocol.K", "must be >= 1");
  if (!(alpha >= 0.0)) throw ConfigError("learning.alpha", "must be >= 0");
  if (!(beta >= 0.0)) throw ConfigError("learning.beta", "must be >= 0");
  if (!(payload >= 0.0)) throw ConfigError("learning.payload", "must be >= 0");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("protocol.theta", "must lie in [0, 1]");
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  if (batches.inner == 0 || batches.outer == 0 || batches.hessian == 0) {
    throw ConfigError("learning.batches", "batch sizes must be >= 1");
  }
  if (mode == Mode::kSync && A != n) throw ConfigError("protocol.A", "sync mode requires A = n");
  if (mode == Mode::kAsync && A != 1) throw ConfigError("protocol.A", "async mode requires A = 1");
  if (mode != Mode::kSemiSync && (policy == BandwidthPolicy::kActiveExtreme ||
                                  policy == BandwidthPolicy::kInterpolated)) {
    throw ConfigError("protocol.bandwidth_policy", "needs a schedule (semi-sync mode only)");
  }
  if (schedule) {
    if (schedule->ues() != n || schedule->rounds() < K) {
      throw ConfigError("protocol.schedule", "shape must be at least K x n");
    }
    if (schedule->participants_per_round() != A) {
      throw ConfigError("protocol.schedule", "row sums must equal A");
    }
  }
}

std::size_t RoundRecord::max_staleness() const {
  return staleness.empty() ? 0 : *std::ranges::max_element(staleness);
}

std::size_t SimTrace::max_staleness() const {
  std::size_t out = 0;
  for (const RoundRecord& r : rounds) out = std::max(out, r.max_staleness());
  return out;
}

double total_time(const SimTrace& trace) {
  return trace.rounds.empty() ? 0.0 : trace.rounds.back().close_time_s;
}

double average_grad_norm_sq(const SimTrace& trace) {
  if (trace.rounds.empty()) return trace.initial_grad_norm_sq;
  double sum = trace.initial_grad_norm_sq;
  for (std::size_t k = 0; k + 1 < trace.rounds.size(); ++k) sum += trace.rounds[k].grad_norm_sq;
  return sum / static_cast<double>(trace.rounds.size());
}

SimTrace run(const RunConfig& config, const Task& task, std::span<const UEProfile> profiles,
             const ChannelParams& channel, const Vec& w0) {
  const RunConfig cfg = config.normalized(profiles.size());
  cfg.validate(profiles.size());
  try {
    validate_population(profiles);
  } catch (const DomainError& e) {
    throw ConfigError("population", e.what());
  }
  if (task.ues() != profiles.size()) throw ConfigError("population", "task and profile counts differ");
  if (static_cast<std::size_t>(w0.size()) != task.dim()) {
    throw ConfigError("learning", "initial model dimension mismatch");
  }
  Simulator sim(cfg, task, profiles, channel, w0);
  return sim.run();
}

SimTrace run_sync(RunConfig config, const Task& task, std::span<const UEProfile> profiles,
                  const ChannelParams& channel, const Vec& w0) {
  config.mode = Mode::kSync;
  return run(config, task, profiles, channel, w0);
}

SimTrace run_async(RunConfig config, const Task& task, std::span<const UEProfile> profiles,
                   const ChannelParams& channel, const Vec& w0) {
  config.mode = Mode::kAsync;
  return run(config, task, profiles, channel, w0);
}

}  // namespace ssfl
