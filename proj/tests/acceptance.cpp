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

// Acceptance checks. `acceptance` runs all ten criteria; `acceptance N` runs
// one. Each prints a single PASS/FAIL line; the exit status is non-zero if
// any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ssfl/analysis.hpp"
#include "ssfl/bandwidth.hpp"
#include "ssfl/config.hpp"
#include "ssfl/error.hpp"
#include "ssfl/experiment.hpp"
#include "ssfl/io.hpp"
#include "ssfl/lambert_w.hpp"
#include "ssfl/learning.hpp"
#include "ssfl/scheduling.hpp"

using namespace ssfl;
namespace fs = std::filesystem;

namespace {

// Tolerances and thresholds.
constexpr double kC1DistTol = 1e-6;
constexpr double kC1Epsilon = 1e-6;
constexpr std::size_t kC1MaxRounds = 2000;
constexpr double kC1MaxSeconds = 10.0;
constexpr double kC1Beta = 0.1;
constexpr std::size_t kC2Runs = 20;
constexpr std::size_t kC2MinPassing = 19;
constexpr double kC2Beta = 0.02;
constexpr double kC3FinishTol = 1e-9;
constexpr double kC3BusyTol = 1e-9;
constexpr double kC4DrawTol = 1e-9;
constexpr double kC4MonteCarloTol = 0.02;
constexpr std::size_t kC4Rounds = 10000;
constexpr std::size_t kC5Points = 10000;
constexpr double kC5ResidualTol = 1e-12;
constexpr double kC5OracleTol = 1e-7;
constexpr std::size_t kC6Cases = 400;
constexpr double kC9RelTol = 1e-6;
constexpr double kC9FullBatchTol = 1e-10;
// Regression floor for the personalized run's accuracy, fixed from the first
// implementation's value on the classification fixture (0.9410 at seed 11).
constexpr double kC8AccuracyFloor = 0.93;

const fs::path kFixtures = SSFL_FIXTURES;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g(double v) { return fmt("%.3g", v); }

nlohmann::json fixture(const std::string& name) {
  return nlohmann::json::parse(read_file(kFixtures / name));
}

SimTrace run_mode(const ExperimentConfig& c, const Task& task, Mode mode,
                  const std::function<void(RunConfig&)>& tweak = {}) {
  RunConfig rc = make_run_config(c, mode);
  if (tweak) tweak(rc);
  return run(rc, task, c.population.profiles, c.channel.params(), initial_model(c, task));
}

UEProfile make_ue(std::size_t id, double distance, double eta, double seconds = 0.002) {
  UEProfile p;
  p.id = id;
  p.transmit_power_w = 0.01;
  p.distance_m = distance;
  p.cpu_hz = 1e9;
  p.sample_count = 100;
  p.cycles_per_sample = seconds * 1e7;
  p.eta = eta;
  return p;
}

double rel_spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::ranges::minmax(v);
  return (hi - lo) / std::max(std::abs(hi), 1e-300);
}

// Noiseless full-batch convergence to the exact meta optimum.
Result criterion1() {
  auto j = fixture("quadratic.json");
  j["learning"]["quadratic"]["sigma_G"] = 0.0;
  j["learning"]["quadratic"]["sigma_H"] = 0.0;
  // A common optimum: with per-UE optima, rounds that aggregate different
  // subsets pull toward different points and a constant step never settles.
  j["learning"]["quadratic"]["theta_spread"] = 0.0;
  j["learning"]["batches"] = "full";
  j["learning"]["beta"] = kC1Beta;
  j["protocol"]["K"] = kC1MaxRounds;
  j["protocol"]["modes"] = {"semi"};
  const auto c = config_from_json(j);
  const auto start = std::chrono::steady_clock::now();
  const auto task = make_task(c);
  const auto trace = run_mode(c, *task, Mode::kSemiSync);
  const auto opt = meta_objective_minimizer(*task, c.learning.alpha);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double dist = (trace.final_model - opt.w).norm();
  const double avg = average_grad_norm_sq(trace);
  const bool ok = dist <= kC1DistTol && avg <= kC1Epsilon && trace.rounds.size() <= kC1MaxRounds &&
                  secs < kC1MaxSeconds;
  return {ok, "||w_K-w*||=" + g(dist) + " avg||grad F||^2=" + g(avg) + " (eps " + g(kC1Epsilon) +
                  ", initial term alone " + g(trace.initial_grad_norm_sq / static_cast<double>(trace.rounds.size())) +
                  ") K=" + std::to_string(trace.rounds.size()) + " runtime=" + fmt("%.2f", secs) + "s"};
}

// Measured average squared gradient norm against the FOSP bound.
Result criterion2() {
  std::size_t passing = 0;
  double worst_ratio = 0.0;
  for (std::size_t s = 1; s <= kC2Runs; ++s) {
    auto j = fixture("quadratic.json");
    j["seed"] = s;
    j["learning"]["beta"] = kC2Beta;
    j["protocol"]["modes"] = {"semi"};
    const auto c = config_from_json(j);
    const auto task = make_task(c);
    const auto& q = dynamic_cast<const QuadraticTask&>(*task);
    const auto trace = run_mode(c, *task, Mode::kSemiSync, [](RunConfig& rc) { rc.keep_models = true; });
    const double alpha = c.learning.alpha;
    const auto opt = meta_objective_minimizer(q, alpha);

    // Ball around w* holding every visited iterate.
    double radius = (initial_model(c, q) - opt.w).norm();
    for (const Vec& w : trace.models) radius = std::max(radius, (w - opt.w).norm());
    Mat mean_q = Mat::Zero(static_cast<Eigen::Index>(q.dim()), static_cast<Eigen::Index>(q.dim()));
    for (std::size_t i = 0; i < q.ues(); ++i) mean_q += q.hessian(i) / static_cast<double>(q.ues());
    Vec mean_grad = Vec::Zero(static_cast<Eigen::Index>(q.dim()));
    for (std::size_t i = 0; i < q.ues(); ++i) mean_grad += q.grad(i, opt.w) / static_cast<double>(q.ues());

    ConvergenceConstants k;
    k.L = q.lipschitz();
    k.rho = 0.0;
    for (std::size_t i = 0; i < q.ues(); ++i) {
      const Vec gi = q.grad(i, opt.w);
      k.C = std::max(k.C, gi.norm() + q.lipschitz() * radius);
      const double spread = Eigen::SelfAdjointEigenSolver<Mat>(q.hessian(i) - mean_q)
                                .eigenvalues().cwiseAbs().maxCoeff();
      k.gamma_G = std::max(k.gamma_G, (gi - mean_grad).norm() + spread * radius);
    }
    k.sigma_G = q.sigma_G();
    k.sigma_H = q.sigma_H();
    k.gamma_H = q.hessian_diversity();
    k.alpha = alpha;
    k.beta = c.learning.beta;
    k.S = static_cast<double>(c.protocol.S);
    k.A = static_cast<double>(resolve_A(c));
    k.K = static_cast<double>(trace.rounds.size());
    k.D_in = static_cast<double>(c.learning.batches.inner);
    k.D_o = static_cast<double>(c.learning.batches.outer);
    k.D_h = static_cast<double>(c.learning.batches.hessian);
    k.F0_minus_Fstar = objective_value(q, initial_model(c, q), Objective::kPfl, alpha) - opt.value;
    k.validate();
    const double bound = theorem1_bound(k);
    const double measured = average_grad_norm_sq(trace);
    if (measured <= bound) ++passing;
    worst_ratio = std::max(worst_ratio, measured / bound);
  }
  return {passing >= kC2MinPassing, std::to_string(passing) + "/" + std::to_string(kC2Runs) +
                                        " runs within the bound (need " + std::to_string(kC2MinPassing) +
                                        "), worst measured/bound=" + g(worst_ratio)};
}

// Equal finishing of scheduled UEs, and no waiting on symmetric instances.
Result criterion3() {
  const auto channel = ChannelParams::from_dbm(1e6, 3.8, -174.0, 40.0);
  const std::size_t n = 8;
  const std::size_t A = 4;
  std::vector<UEProfile> pop;
  for (std::size_t i = 0; i < n; ++i) pop.push_back(make_ue(i, 20.0 + 22.0 * static_cast<double>(i), 1.0 / 8.0));

  // Per-draw: identical compute, heterogeneous channels, random subsets.
  double worst_draw = 0.0;
  const CounterRng rng(31);
  std::mt19937_64 pick(4);
  for (std::size_t k = 0; k < 1000; ++k) {
    const auto h = draw_round(rng, k, pop, channel);
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), pick);
    std::vector<std::uint8_t> row(n, 0);
    for (std::size_t j = 0; j < A; ++j) row[ids[j]] = 1;
    const auto shares = allocate_extreme_active(row, pop, h, channel);
    std::vector<double> finish;
    for (std::size_t i = 0; i < n; ++i) {
      if (row[i]) finish.push_back(compute_delay(pop[i]) + comm_delay(1e5, uplink_rate(shares[i], pop[i], h[i], channel)));
    }
    worst_draw = std::max(worst_draw, rel_spread(finish));
  }

  // Engine: finish times of each round's scheduled uploads.
  RunConfig rc;
  rc.mode = Mode::kSemiSync;
  rc.A = A;
  rc.S = 2;
  rc.K = 200;
  rc.alpha = 0.03;
  rc.beta = 0.05;
  rc.payload = 1e5;
  rc.seed = 5;
  QuadraticTask::Params qp;
  qp.dim = 4;
  qp.ues = n;
  const auto task = QuadraticTask::generate(qp, CounterRng(5));
  const auto trace = run(rc, task, pop, channel, Vec::Zero(4));
  std::map<std::size_t, std::vector<double>> by_round;
  for (const auto& up : trace.ledger.uploads) {
    if (up.completed) by_round[up.round].push_back(up.time_s);
  }
  double worst_engine = 0.0;
  for (const auto& [round, times] : by_round) {
    if (times.size() == A) worst_engine = std::max(worst_engine, rel_spread(times));
  }

  // Busy time on symmetric, fixed-channel instances.
  const auto fixed = ChannelParams::from_dbm(1e6, 3.8, -174.0, 40.0, Fading::kFixed);
  double worst_busy = 0.0;
  for (auto [ues, participants, policy] :
       {std::tuple{std::size_t{4}, std::size_t{2}, BandwidthPolicy::kAllShareExtreme},
        std::tuple{std::size_t{4}, std::size_t{4}, BandwidthPolicy::kActiveExtreme}}) {
    std::vector<UEProfile> sym;
    for (std::size_t i = 0; i < ues; ++i) sym.push_back(make_ue(i, 100.0, 1.0 / static_cast<double>(ues)));
    RunConfig s = rc;
    s.A = participants;
    s.K = 40;
    s.policy = policy;
    QuadraticTask::Params sp;
    sp.dim = 4;
    sp.ues = ues;
    const auto st = run(s, QuadraticTask::generate(sp, CounterRng(6)), sym, fixed, Vec::Zero(4));
    for (double busy : st.busy_time_s) {
      worst_busy = std::max(worst_busy, std::abs(busy - total_time(st)) / total_time(st));
    }
  }
  const bool ok = worst_draw <= kC3FinishTol && worst_engine <= kC3FinishTol && worst_busy <= kC3BusyTol;
  return {ok, "finish spread per draw=" + g(worst_draw) + " in engine=" + g(worst_engine) +
                  " busy vs total=" + g(worst_busy)};
}

// Weighted-rate equalization per draw and in expectation.
Result criterion4() {
  const auto channel = ChannelParams::from_dbm(1e6, 3.8, -174.0, 40.0);
  const std::vector<double> weights{3, 2, 2, 1, 1, 1, 2, 3, 1, 4};
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<UEProfile> pop;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    pop.push_back(make_ue(i, 30.0 + 15.0 * static_cast<double>(i), weights[i] / total));
  }
  std::vector<double> eta;
  for (const auto& p : pop) eta.push_back(p.eta);
  const std::size_t n = pop.size();
  const std::size_t A = 2;  // max eta is 0.2, reachable with A = 2
  const auto schedule = greedy_schedule(eta, A, kC4Rounds);
  const CounterRng rng(77);

  double worst_draw = 0.0;
  // Active-only: a UE outside A_k gets no bandwidth, so its unconditional mean
  // rate scales with how often it is scheduled. The expectation is therefore
  // taken over the rounds that schedule it.
  std::vector<double> mean_active(n, 0.0);
  std::vector<std::size_t> scheduled(n, 0);
  std::vector<double> mean_all(n, 0.0);
  for (std::size_t k = 0; k < kC4Rounds; ++k) {
    const auto h = draw_round(rng, k, pop, channel);
    const auto act = allocate_extreme_active(schedule.row(k), pop, h, channel);
    const auto all = allocate_extreme_all(pop, h, channel);
    std::vector<double> ra;
    std::vector<double> rl;
    for (std::size_t i = 0; i < n; ++i) {
      const double r_all = uplink_rate(all[i], pop[i], h[i], channel);
      rl.push_back(r_all / eta[i]);
      mean_all[i] += r_all;
      if (act[i] > 0.0) {
        const double r_act = uplink_rate(act[i], pop[i], h[i], channel);
        ra.push_back(r_act / eta[i]);
        mean_active[i] += r_act;
        ++scheduled[i];
      }
    }
    worst_draw = std::max({worst_draw, rel_spread(ra), rel_spread(rl)});
  }
  std::vector<double> mc_active;
  std::vector<double> mc_all;
  for (std::size_t i = 0; i < n; ++i) {
    mc_active.push_back(mean_active[i] / static_cast<double>(scheduled[i]) / eta[i]);
    mc_all.push_back(mean_all[i] / static_cast<double>(kC4Rounds) / eta[i]);
  }
  const double mc = std::max(rel_spread(mc_active), rel_spread(mc_all));

  return {worst_draw <= kC4DrawTol && mc <= kC4MonteCarloTol,
          "per-draw spread=" + g(worst_draw) + " Monte-Carlo spread active=" + g(rel_spread(mc_active)) +
              " all=" + g(rel_spread(mc_all))};
}

// Lambert W residuals against the bisection oracle.
Result criterion5() {
  const double branch = -std::exp(-1.0);
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_res = 0.0;
  double worst_oracle = 0.0;
  for (std::size_t j = 0; j < kC5Points; ++j) {
    const double xp = branch + (10.0 - branch) * u(gen);
    const double wp = lambert_w(xp, LambertBranch::kPrincipal);
    worst_res = std::max(worst_res, std::abs(wp * std::exp(wp) - xp));
    worst_oracle = std::max(worst_oracle, std::abs(wp - oracle::lambert_principal(xp)));

    // Lower branch: log-uniform towards 0 from the branch point.
    const double xl = -std::exp(-1.0 - 699.0 * u(gen));
    const double wl = lambert_w(xl, LambertBranch::kLower);
    worst_res = std::max(worst_res, std::abs(wl * std::exp(wl) - xl));
    worst_oracle = std::max(worst_oracle, std::abs(wl - oracle::lambert_lower(xl)) / std::max(1.0, std::abs(wl)));
  }
  bool degenerate = false;
  try {
    lambert_denominator(1.0);
  } catch (const DegenerateError&) {
    degenerate = true;
  }
  return {worst_res <= kC5ResidualTol && worst_oracle <= kC5OracleTol && degenerate,
          "max residual=" + g(worst_res) + " max oracle gap=" + g(worst_oracle) +
              " Gamma=1 raises=" + (degenerate ? "yes" : "no")};
}

// Greedy scheduler on a randomized grid of rational targets.
Result criterion6() {
  std::mt19937_64 gen(2024);
  std::size_t failures = 0;
  std::size_t unreachable_cases = 0;
  std::size_t failures_reachable = 0;
  double worst_drift = 0.0;
  for (std::size_t c = 0; c < kC6Cases; ++c) {
    const std::size_t n = 1 + gen() % 32;
    const std::size_t A = 1 + gen() % n;
    const std::size_t K = 1 + gen() % 512;
    std::vector<double> eta(n);
    double sum = 0.0;
    for (auto& e : eta) {
      e = static_cast<double>(1 + gen() % 10);
      sum += e;
    }
    for (auto& e : eta) e /= sum;
    const auto m = greedy_schedule(eta, A, K);
    const auto stats = relative_frequency(m, eta);
    bool ok = true;
    for (std::size_t k = 0; k < K; ++k) {
      const auto row = m.row(k);
      if (static_cast<std::size_t>(std::count(row.begin(), row.end(), 1)) != A) ok = false;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += row[i] ? eta[i] : 0.0;
      if (s > std::sqrt(static_cast<double>(A)) + 1e-12) ok = false;
    }
    const double bound = static_cast<double>(A) / static_cast<double>(K);
    for (std::size_t i = 0; i < n; ++i) {
      const double drift = std::abs(stats.achieved_eta[i] - eta[i]);
      worst_drift = std::max(worst_drift, drift / bound);
      if (drift > bound + 1e-12) ok = false;
    }
    const bool reachable = *std::ranges::max_element(eta) <= 1.0 / static_cast<double>(A) + 1e-12;
    if (!reachable) ++unreachable_cases;
    if (!ok) {
      ++failures;
      if (reachable) ++failures_reachable;
    }
  }
  const SchedulingMatrix pattern(4, 4, 2, 2, {1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1});
  const bool fixture_ok = greedy_schedule(std::vector<double>(4, 0.25), 2, 4, 2) == pattern;
  return {failures == 0 && fixture_ok,
          std::to_string(failures) + "/" + std::to_string(kC6Cases) + " cases violate (" +
              std::to_string(failures_reachable) + " with every eta_i <= 1/A; " +
              std::to_string(unreachable_cases) + " cases have some eta_i > 1/A), worst drift=" +
              g(worst_drift) + " x A/K, alternating fixture " + (fixture_ok ? "exact" : "differs")};
}

// Semi-sync against sync and async on the standard fixture.
Result criterion7() {
  const auto c = config_from_json(fixture("quadratic.json"));
  const auto task = make_task(c);
  const std::size_t K = resolve_K(c);
  const std::size_t A = resolve_A(c);
  const std::size_t n = c.population.n;
  const std::size_t gradients = A * K;
  const auto semi = run_mode(c, *task, Mode::kSemiSync);
  const auto sync = run_mode(c, *task, Mode::kSync, [&](RunConfig& rc) { rc.K = gradients / n; });
  const auto async = run_mode(c, *task, Mode::kAsync, [&](RunConfig& rc) { rc.K = gradients; });
  const bool ok = A == 5 && total_time(semi) < total_time(sync) && async.max_staleness() > c.protocol.S &&
                  semi.max_staleness() <= c.protocol.S;
  return {ok, std::to_string(gradients) + " gradients: semi " + fmt("%.4g", total_time(semi)) + "s vs sync " +
                  fmt("%.4g", total_time(sync)) + "s; max staleness async=" +
                  std::to_string(async.max_staleness()) + " semi=" + std::to_string(semi.max_staleness()) +
                  " (S=" + std::to_string(c.protocol.S) + ")"};
}

// Personalized against plain objective at equal simulated time.
Result criterion8() {
  const auto c = config_from_json(fixture("classification.json"));
  const auto task = make_task(c);
  const auto pfl = run_mode(c, *task, Mode::kSemiSync, [](RunConfig& rc) { rc.objective = Objective::kPfl; });
  const auto fl = run_mode(c, *task, Mode::kSemiSync, [](RunConfig& rc) { rc.objective = Objective::kFl; });
  const double horizon = std::min(total_time(pfl), total_time(fl));
  auto at = [horizon](const SimTrace& t) {
    double acc = t.initial_accuracy.value_or(0.0);
    for (const auto& r : t.rounds) {
      if (r.close_time_s <= horizon) acc = r.accuracy.value_or(0.0);
    }
    return acc;
  };
  const double a_pfl = at(pfl);
  const double a_fl = at(fl);
  return {a_pfl > a_fl && a_pfl >= kC8AccuracyFloor,
          "accuracy at " + fmt("%.4g", horizon) + "s: personalized=" + fmt("%.4f", a_pfl) +
              " plain=" + fmt("%.4f", a_fl) + " (floor " + fmt("%.4f", kC8AccuracyFloor) + ")"};
}

// Meta-gradient finite differences and full-batch degeneracy.
Result criterion9() {
  QuadraticTask::Params qp;
  qp.sigma_G = 0.2;
  qp.sigma_H = 0.2;
  const auto quad = QuadraticTask::generate(qp, CounterRng(3));
  ClassificationTask::Params cp;
  cp.ues = 6;
  const auto cls = ClassificationTask::generate(cp, CounterRng(3));
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd(0.0, 0.5);
  double worst_fd = 0.0;
  double worst_full = 0.0;
  for (const Task* t : {static_cast<const Task*>(&quad), static_cast<const Task*>(&cls)}) {
    for (std::size_t p = 0; p < 6; ++p) {
      Vec w(static_cast<Eigen::Index>(t->dim()));
      for (auto& x : w) x = nd(gen);
      const std::size_t ue = p % t->ues();
      const double alpha = 0.03;
      const Vec exact = meta_grad_exact(*t, ue, w, alpha);
      const Vec fd = oracle::fd_gradient([&](const Vec& x) { return meta_loss_exact(*t, ue, x, alpha); }, w);
      worst_fd = std::max(worst_fd, (exact - fd).norm() / std::max(fd.norm(), 1e-12));
      std::mt19937_64 engine(p);
      const Vec full = meta_grad_stochastic(*t, ue, w, alpha, BatchSizes{}, engine);
      worst_full = std::max(worst_full, (full - exact).cwiseAbs().maxCoeff());
    }
  }
  return {worst_fd <= kC9RelTol && worst_full <= kC9FullBatchTol,
          "max relative FD error=" + g(worst_fd) + " max full-batch gap=" + g(worst_full)};
}

// Byte-identical traces across repeated runs and worker counts.
Result criterion10() {
  const fs::path root = fs::temp_directory_path() / "ssfl_acceptance_determinism";
  fs::remove_all(root);
  std::vector<fs::path> dirs;
  for (auto [tag, workers] : {std::pair{"a", 1}, std::pair{"b", 1}, std::pair{"c", 4}}) {
    auto c = config_from_json(fixture("quadratic.json"));
    c.output_dir = (root / tag).string();
    c.workers = static_cast<std::size_t>(workers);
    run_experiment(c);
    dirs.push_back(root / tag);
  }
  std::size_t compared = 0;
  std::size_t differing = 0;
  for (const auto& entry : fs::directory_iterator(dirs.front())) {
    const auto name = entry.path().filename().string();
    if (name.rfind("trace_", 0) != 0) continue;
    const std::string ref = read_file(entry.path());
    for (std::size_t d = 1; d < dirs.size(); ++d) {
      ++compared;
      if (read_file(dirs[d] / name) != ref) ++differing;
    }
  }
  fs::remove_all(root);
  return {compared >= 6 && differing == 0,
          std::to_string(compared) + " trace comparisons (repeat and 4 workers), " +
              std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Result()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                      criterion5, criterion6, criterion7, criterion8,
                                                      criterion9, criterion10};
  std::vector<std::size_t> selected;
  for (int a = 1; a < argc; ++a) selected.push_back(std::strtoul(argv[a], nullptr, 10));
  if (selected.empty()) {
    for (std::size_t i = 1; i <= criteria.size(); ++i) selected.push_back(i);
  }
  bool all = true;
  for (std::size_t id : selected) {
    if (id < 1 || id > criteria.size()) {
      std::fprintf(stderr, "unknown criterion %zu\n", id);
      return 2;
    }
    Result r;
    try {
      r = criteria[id - 1]();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %zu: %s  %s\n", id, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
