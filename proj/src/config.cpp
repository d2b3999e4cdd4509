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


#include "ssfl/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "ssfl/error.hpp"
#include "ssfl/io.hpp"

namespace ssfl {

namespace {

using nlohmann::json;

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(join_path(path, key), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(join_path(path, key), "missing required field");
  return obj.at(key);
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(field, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

void read_number(const json& obj, const std::string& path, const char* key, double& out) {
  if (obj.contains(key)) out = as_number(obj.at(key), join_path(path, key));
}

void read_count(const json& obj, const std::string& path, const char* key, std::size_t& out) {
  if (obj.contains(key)) out = as_count(obj.at(key), join_path(path, key));
}

template <typename Parse>
auto parse_enum(const json& v, const std::string& field, Parse parse) {
  const std::string text = as_string(v, field);
  try {
    return parse(text);
  } catch (const DomainError& e) {
    throw ConfigError(field, e.what());
  }
}

void require_positive(double v, const std::string& field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be positive");
}

Fading parse_fading(const std::string& s) {
  if (s == "rayleigh") return Fading::kRayleigh;
  if (s == "fixed") return Fading::kFixed;
  throw DomainError("unknown fading: " + s);
}

EtaMode parse_eta_mode(const std::string& s) {
  if (s == "equal") return EtaMode::kEqual;
  if (s == "distance") return EtaMode::kDistance;
  throw DomainError("unknown eta_mode: " + s);
}

Redistribution parse_redistribution(const std::string& s) {
  if (s == "abandon") return Redistribution::kAbandon;
  if (s == "finish") return Redistribution::kFinish;
  throw DomainError("unknown redistribution: " + s);
}

TaskKind parse_task(const std::string& s) {
  if (s == "quadratic") return TaskKind::kQuadratic;
  if (s == "classification") return TaskKind::kClassification;
  throw DomainError("unknown task: " + s);
}

std::size_t batch_from_json(const json& v, const std::string& field) {
  if (v.is_string() && v.get<std::string>() == "full") return kFullBatch;
  const std::size_t b = as_count(v, field);
  if (b == 0) throw ConfigError(field, "must be >= 1 or \"full\"");
  return b;
}

json batch_to_json(std::size_t b) {
  return b == kFullBatch ? json("full") : json(b);
}

ChannelConfig read_channel(const json& j) {
  const std::string path = "channel";
  check_keys(j, path, {"bandwidth_hz", "path_loss_exp", "noise_dbm_per_hz", "rayleigh_scale", "fading"});
  ChannelConfig c;
  c.bandwidth_hz = as_number(require(j, path, "bandwidth_hz"), "channel.bandwidth_hz");
  read_number(j, path, "path_loss_exp", c.path_loss_exp);
  read_number(j, path, "noise_dbm_per_hz", c.noise_dbm_per_hz);
  read_number(j, path, "rayleigh_scale", c.rayleigh_scale);
  if (j.contains("fading")) c.fading = parse_enum(j.at("fading"), "channel.fading", parse_fading);
  require_positive(c.bandwidth_hz, "channel.bandwidth_hz");
  require_positive(c.path_loss_exp, "channel.path_loss_exp");
  require_positive(c.rayleigh_scale, "channel.rayleigh_scale");
  if (!std::isfinite(c.noise_dbm_per_hz)) throw ConfigError("channel.noise_dbm_per_hz", "must be finite");
  return c;
}

UEProfile read_profile(const json& j, const std::string& path) {
  check_keys(j, path, {"id", "transmit_power_w", "distance_m", "cycles_per_sample", "cpu_hz",
                       "sample_count", "eta"});
  UEProfile p;
  p.id = as_count(require(j, path, "id"), join_path(path, "id"));
  p.transmit_power_w = as_number(require(j, path, "transmit_power_w"), join_path(path, "transmit_power_w"));
  p.distance_m = as_number(require(j, path, "distance_m"), join_path(path, "distance_m"));
  p.cycles_per_sample = as_number(require(j, path, "cycles_per_sample"), join_path(path, "cycles_per_sample"));
  p.cpu_hz = as_number(require(j, path, "cpu_hz"), join_path(path, "cpu_hz"));
  p.sample_count = as_count(require(j, path, "sample_count"), join_path(path, "sample_count"));
  p.eta = as_number(require(j, path, "eta"), join_path(path, "eta"));
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return p;
}

json profile_to_json(const UEProfile& p) {
  return {{"id", p.id},
          {"transmit_power_w", p.transmit_power_w},
          {"distance_m", p.distance_m},
          {"cycles_per_sample", p.cycles_per_sample},
          {"cpu_hz", p.cpu_hz},
          {"sample_count", p.sample_count},
          {"eta", p.eta}};
}

PopulationConfig read_population(const json& j, const ChannelConfig& channel, std::uint64_t seed) {
  const std::string path = "population";
  check_keys(j, path, {"n", "eta_mode", "generator", "profiles"});
  PopulationConfig pop;
  if (j.contains("eta_mode")) {
    pop.eta_mode = parse_enum(j.at("eta_mode"), "population.eta_mode", parse_eta_mode);
  }
  if (j.contains("generator")) {
    const json& g = j.at("generator");
    const std::string gp = "population.generator";
    check_keys(g, gp, {"transmit_power_w", "distance_max_m", "cycles_per_sample", "cpu_hz_min",
                       "cpu_hz_max", "sample_count"});
    auto& gen = pop.generator;
    read_number(g, gp, "transmit_power_w", gen.transmit_power_w);
    read_number(g, gp, "distance_max_m", gen.distance_max_m);
    read_number(g, gp, "cycles_per_sample", gen.cycles_per_sample);
    read_number(g, gp, "cpu_hz_min", gen.cpu_hz_min);
    read_number(g, gp, "cpu_hz_max", gen.cpu_hz_max);
    read_count(g, gp, "sample_count", gen.sample_count);
    require_positive(gen.transmit_power_w, gp + ".transmit_power_w");
    require_positive(gen.distance_max_m, gp + ".distance_max_m");
    require_positive(gen.cpu_hz_min, gp + ".cpu_hz_min");
    if (gen.cpu_hz_max < gen.cpu_hz_min) throw ConfigError(gp + ".cpu_hz_max", "must be >= cpu_hz_min");
    if (gen.sample_count < 1) throw ConfigError(gp + ".sample_count", "must be >= 1");
    if (!(gen.cycles_per_sample >= 0.0)) throw ConfigError(gp + ".cycles_per_sample", "must be >= 0");
  }
  if (j.contains("profiles")) {
    const json& arr = j.at("profiles");
    if (!arr.is_array() || arr.empty()) throw ConfigError("population.profiles", "expected a non-empty array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      pop.profiles.push_back(read_profile(arr[i], "population.profiles[" + std::to_string(i) + "]"));
    }
    pop.n = pop.profiles.size();
    if (j.contains("n") && as_count(j.at("n"), "population.n") != pop.n) {
      throw ConfigError("population.n", "does not match the number of profiles");
    }
    try {
      validate_population(pop.profiles);
    } catch (const DomainError& e) {
      throw ConfigError("population.profiles", e.what());
    }
  } else {
    pop.n = as_count(require(j, path, "n"), "population.n");
    if (pop.n == 0) throw ConfigError("population.n", "must be >= 1");
    pop.profiles = generate_profiles(pop.n, pop.eta_mode, pop.generator, channel.params(),
                                     CounterRng(seed));
    try {
      validate_population(pop.profiles);
    } catch (const DomainError& e) {
      throw std::logic_error(std::string("generated participation targets are invalid: ") + e.what());
    }
  }
  return pop;
}

LearningConfig read_learning(const json& j, std::size_t n) {
  const std::string path = "learning";
  check_keys(j, path, {"task", "quadratic", "classification", "alpha", "beta", "batches", "payload",
                       "w0_scale"});
  LearningConfig l;
  if (j.contains("task")) l.task = parse_enum(j.at("task"), "learning.task", parse_task);
  if (j.contains("quadratic")) {
    const json& q = j.at("quadratic");
    const std::string qp = "learning.quadratic";
    check_keys(q, qp, {"dim", "eig_min", "eig_max", "theta_scale", "theta_spread", "sigma_G", "sigma_H"});
    read_count(q, qp, "dim", l.quadratic.dim);
    read_number(q, qp, "eig_min", l.quadratic.eig_min);
    read_number(q, qp, "eig_max", l.quadratic.eig_max);
    read_number(q, qp, "theta_scale", l.quadratic.theta_scale);
    read_number(q, qp, "theta_spread", l.quadratic.theta_spread);
    read_number(q, qp, "sigma_G", l.quadratic.sigma_G);
    read_number(q, qp, "sigma_H", l.quadratic.sigma_H);
    if (l.quadratic.dim == 0) throw ConfigError(qp + ".dim", "must be >= 1");
    require_positive(l.quadratic.eig_min, qp + ".eig_min");
    if (l.quadratic.eig_max < l.quadratic.eig_min) throw ConfigError(qp + ".eig_max", "must be >= eig_min");
    for (const char* key : {"theta_scale", "theta_spread", "sigma_G", "sigma_H"}) {
      if (q.contains(key) && !(q.at(key).get<double>() >= 0.0)) throw ConfigError(qp + "." + key, "must be >= 0");
    }
  }
  l.quadratic.ues = n;
  if (j.contains("classification")) {
    const json& c = j.at("classification");
    const std::string cp = "learning.classification";
    check_keys(c, cp, {"classes", "features", "level", "min_size", "max_size", "test_per_ue",
                       "class_separation", "feature_noise"});
    auto& p = l.classification;
    read_count(c, cp, "classes", p.classes);
    read_count(c, cp, "features", p.features);
    read_count(c, cp, "level", p.level);
    read_count(c, cp, "min_size", p.min_size);
    read_count(c, cp, "max_size", p.max_size);
    read_count(c, cp, "test_per_ue", p.test_per_ue);
    read_number(c, cp, "class_separation", p.class_separation);
    read_number(c, cp, "feature_noise", p.feature_noise);
  }
  l.classification.ues = n;
  {
    const auto& p = l.classification;
    const std::string cp = "learning.classification";
    if (p.classes < 2) throw ConfigError(cp + ".classes", "must be >= 2");
    if (p.features < 1) throw ConfigError(cp + ".features", "must be >= 1");
    if (p.level < 1 || p.level > p.classes) throw ConfigError(cp + ".level", "must lie in [1, classes]");
    if (p.min_size < p.level || p.max_size < p.min_size) {
      throw ConfigError(cp + ".min_size", "need level <= min_size <= max_size");
    }
    if (p.test_per_ue < p.level) throw ConfigError(cp + ".test_per_ue", "must be >= level");
  }
  read_number(j, path, "alpha", l.alpha);
  read_number(j, path, "beta", l.beta);
  read_number(j, path, "payload", l.payload);
  read_number(j, path, "w0_scale", l.w0_scale);
  if (!(l.alpha >= 0.0)) throw ConfigError("learning.alpha", "must be >= 0");
  if (!(l.beta > 0.0)) throw ConfigError("learning.beta", "must be positive");
  if (!(l.payload >= 0.0)) throw ConfigError("learning.payload", "must be >= 0");
  if (!(l.w0_scale >= 0.0)) throw ConfigError("learning.w0_scale", "must be >= 0");
  if (j.contains("batches")) {
    const json& b = j.at("batches");
    if (b.is_string()) {
      const std::size_t all = batch_from_json(b, "learning.batches");
      l.batches = BatchSizes{all, all, all};
    } else {
      check_keys(b, "learning.batches", {"inner", "outer", "hessian"});
      if (b.contains("inner")) l.batches.inner = batch_from_json(b.at("inner"), "learning.batches.inner");
      if (b.contains("outer")) l.batches.outer = batch_from_json(b.at("outer"), "learning.batches.outer");
      if (b.contains("hessian")) l.batches.hessian = batch_from_json(b.at("hessian"), "learning.batches.hessian");
    }
  }
  return l;
}

ProtocolConfig read_protocol(const json& j, std::size_t n) {
  const std::string path = "protocol";
  check_keys(j, path, {"modes", "objective", "A", "S", "K", "epsilon", "bandwidth_policy", "theta",
                       "redistribute", "enforce_staleness"});
  ProtocolConfig p;
  if (j.contains("modes")) {
    const json& m = j.at("modes");
    if (!m.is_array() || m.empty()) throw ConfigError("protocol.modes", "expected a non-empty array");
    p.modes.clear();
    for (const auto& v : m) p.modes.push_back(parse_enum(v, "protocol.modes", parse_mode));
  }
  if (j.contains("objective")) p.objective = parse_enum(j.at("objective"), "protocol.objective", parse_objective);
  auto read_auto = [&](const char* key) -> std::optional<std::size_t> {
    const json& v = require(j, path, key);
    if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
    const std::size_t value = as_count(v, join_path(path, key));
    if (value == 0) throw ConfigError(join_path(path, key), "must be >= 1");
    return value;
  };
  p.A = read_auto("A");
  p.K = read_auto("K");
  if (p.A && *p.A > n) throw ConfigError("protocol.A", "must not exceed n");
  read_count(j, path, "S", p.S);
  if (p.S < 1) throw ConfigError("protocol.S", "must be >= 1");
  read_number(j, path, "epsilon", p.epsilon);
  require_positive(p.epsilon, "protocol.epsilon");
  if (j.contains("bandwidth_policy")) {
    p.policy = parse_enum(j.at("bandwidth_policy"), "protocol.bandwidth_policy", parse_bandwidth_policy);
  }
  read_number(j, path, "theta", p.theta);
  if (!(p.theta >= 0.0 && p.theta <= 1.0)) throw ConfigError("protocol.theta", "must lie in [0, 1]");
  if (j.contains("redistribute")) {
    p.redistribution = parse_enum(j.at("redistribute"), "protocol.redistribute", parse_redistribution);
  }
  if (j.contains("enforce_staleness")) {
    if (!j.at("enforce_staleness").is_boolean()) throw ConfigError("protocol.enforce_staleness", "expected a boolean");
    p.enforce_staleness = j.at("enforce_staleness").get<bool>();
  }
  return p;
}

ConvergenceConstants read_analysis(const json& j) {
  const std::string path = "analysis";
  check_keys(j, path, {"L", "C", "rho", "sigma_G", "sigma_H", "gamma_G", "gamma_H", "alpha", "beta",
                       "S", "A", "K", "D_in", "D_o", "D_h", "F0_minus_Fstar"});
  ConvergenceConstants c;
  read_number(j, path, "L", c.L);
  read_number(j, path, "C", c.C);
  read_number(j, path, "rho", c.rho);
  read_number(j, path, "sigma_G", c.sigma_G);
  read_number(j, path, "sigma_H", c.sigma_H);
  read_number(j, path, "gamma_G", c.gamma_G);
  read_number(j, path, "gamma_H", c.gamma_H);
  read_number(j, path, "alpha", c.alpha);
  read_number(j, path, "beta", c.beta);
  read_number(j, path, "S", c.S);
  read_number(j, path, "A", c.A);
  read_number(j, path, "K", c.K);
  read_number(j, path, "D_in", c.D_in);
  read_number(j, path, "D_o", c.D_o);
  read_number(j, path, "D_h", c.D_h);
  read_number(j, path, "F0_minus_Fstar", c.F0_minus_Fstar);
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return c;
}

json analysis_to_json(const ConvergenceConstants& c) {
  return {{"L", c.L}, {"C", c.C}, {"rho", c.rho}, {"sigma_G", c.sigma_G}, {"sigma_H", c.sigma_H},
          {"gamma_G", c.gamma_G}, {"gamma_H", c.gamma_H}, {"alpha", c.alpha}, {"beta", c.beta},
          {"S", c.S}, {"A", c.A}, {"K", c.K}, {"D_in", c.D_in}, {"D_o", c.D_o}, {"D_h", c.D_h},
          {"F0_minus_Fstar", c.F0_minus_Fstar}};
}

}  // namespace

ChannelParams ChannelConfig::params() const {
  return ChannelParams::from_dbm(bandwidth_hz, path_loss_exp, noise_dbm_per_hz, rayleigh_scale, fading);
}

double expected_rate(const UEProfile& ue, double bandwidth_hz, const ChannelParams& channel) {
  if (channel.fading() == Fading::kFixed) {
    return uplink_rate(bandwidth_hz, ue, channel.rayleigh_scale() * std::sqrt(std::numbers::pi / 2.0),
                       channel);
  }
  constexpr int kNodes = 20000;
  double total = 0.0;
  for (int j = 0; j < kNodes; ++j) {
    const double u = (j + 0.5) / kNodes;
    const double h = channel.rayleigh_scale() * std::sqrt(-2.0 * std::log(u));
    total += uplink_rate(bandwidth_hz, ue, h, channel);
  }
  return total / kNodes;
}

std::vector<UEProfile> generate_profiles(std::size_t n, EtaMode mode,
                                         const PopulationGenerator& generator,
                                         const ChannelParams& channel, const CounterRng& rng) {
  std::vector<UEProfile> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    UEProfile& p = out[i];
    p.id = i;
    p.transmit_power_w = generator.transmit_power_w;
    p.distance_m = generator.distance_max_m * rng.uniform_open0(Stream::kPlacement, i, 0);
    p.cycles_per_sample = generator.cycles_per_sample;
    const double u = rng.uniform_open0(Stream::kPlacement, i, 1);
    p.cpu_hz = generator.cpu_hz_min + (generator.cpu_hz_max - generator.cpu_hz_min) * (1.0 - u);
    p.sample_count = generator.sample_count;
  }
  std::vector<double> weight(n, 1.0);
  if (mode == EtaMode::kDistance) {
    const double share = channel.total_bandwidth_hz() / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) weight[i] = expected_rate(out[i], share, channel);
  }
  double total = 0.0;
  for (double w : weight) total += w;
  for (std::size_t i = 0; i < n; ++i) out[i].eta = weight[i] / total;
  return out;
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "", {"seed", "channel", "population", "learning", "protocol", "analysis", "sweep",
                     "output_dir", "workers"});
  ExperimentConfig c;
  const json& seed = require(j, "", "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    throw ConfigError("seed", "expected a non-negative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  c.channel = read_channel(require(j, "", "channel"));
  c.population = read_population(require(j, "", "population"), c.channel, c.seed);
  c.learning = read_learning(require(j, "", "learning"), c.population.n);
  c.protocol = read_protocol(require(j, "", "protocol"), c.population.n);
  if (j.contains("analysis")) c.analysis = read_analysis(j.at("analysis"));
  if ((!c.protocol.K || !c.protocol.A) && !c.analysis) {
    throw ConfigError("analysis", "required when protocol.K or protocol.A is \"auto\"");
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, "sweep", {"parameter", "values"});
    SweepConfig sw;
    sw.parameter = as_string(require(s, "sweep", "parameter"), "sweep.parameter");
    static const std::set<std::string> known{"A", "S", "K", "level", "beta", "theta"};
    if (!known.count(sw.parameter)) throw ConfigError("sweep.parameter", "unknown sweep parameter");
    const json& values = require(s, "sweep", "values");
    if (!values.is_array() || values.empty()) throw ConfigError("sweep.values", "expected a non-empty array");
    for (const auto& v : values) sw.values.push_back(as_number(v, "sweep.values"));
    c.sweep = sw;
  }
  if (j.contains("output_dir")) c.output_dir = as_string(j.at("output_dir"), "output_dir");
  if (j.contains("workers")) {
    c.workers = as_count(j.at("workers"), "workers");
    if (c.workers < 1) throw ConfigError("workers", "must be >= 1");
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["channel"] = {{"bandwidth_hz", c.channel.bandwidth_hz},
                  {"path_loss_exp", c.channel.path_loss_exp},
                  {"noise_dbm_per_hz", c.channel.noise_dbm_per_hz},
                  {"rayleigh_scale", c.channel.rayleigh_scale},
                  {"fading", c.channel.fading == Fading::kRayleigh ? "rayleigh" : "fixed"}};
  const auto& g = c.population.generator;
  json profiles = json::array();
  for (const auto& p : c.population.profiles) profiles.push_back(profile_to_json(p));
  j["population"] = {{"n", c.population.n},
                     {"eta_mode", c.population.eta_mode == EtaMode::kEqual ? "equal" : "distance"},
                     {"generator",
                      {{"transmit_power_w", g.transmit_power_w},
                       {"distance_max_m", g.distance_max_m},
                       {"cycles_per_sample", g.cycles_per_sample},
                       {"cpu_hz_min", g.cpu_hz_min},
                       {"cpu_hz_max", g.cpu_hz_max},
                       {"sample_count", g.sample_count}}},
                     {"profiles", profiles}};
  const auto& l = c.learning;
  const auto& q = l.quadratic;
  const auto& cl = l.classification;
  j["learning"] = {{"task", std::string(to_string(l.task))},
                   {"quadratic",
                    {{"dim", q.dim},
                     {"eig_min", q.eig_min},
                     {"eig_max", q.eig_max},
                     {"theta_scale", q.theta_scale},
                     {"theta_spread", q.theta_spread},
                     {"sigma_G", q.sigma_G},
                     {"sigma_H", q.sigma_H}}},
                   {"classification",
                    {{"classes", cl.classes},
                     {"features", cl.features},
                     {"level", cl.level},
                     {"min_size", cl.min_size},
                     {"max_size", cl.max_size},
                     {"test_per_ue", cl.test_per_ue},
                     {"class_separation", cl.class_separation},
                     {"feature_noise", cl.feature_noise}}},
                   {"alpha", l.alpha},
                   {"beta", l.beta},
                   {"batches",
                    {{"inner", batch_to_json(l.batches.inner)},
                     {"outer", batch_to_json(l.batches.outer)},
                     {"hessian", batch_to_json(l.batches.hessian)}}},
                   {"payload", l.payload},
                   {"w0_scale", l.w0_scale}};
  const auto& p = c.protocol;
  json modes = json::array();
  for (Mode m : p.modes) modes.push_back(std::string(to_string(m)));
  j["protocol"] = {{"modes", modes},
                   {"objective", std::string(to_string(p.objective))},
                   {"A", p.A ? json(*p.A) : json("auto")},
                   {"S", p.S},
                   {"K", p.K ? json(*p.K) : json("auto")},
                   {"epsilon", p.epsilon},
                   {"bandwidth_policy", std::string(to_string(p.policy))},
                   {"theta", p.theta},
                   {"redistribute", p.redistribution == Redistribution::kAbandon ? "abandon" : "finish"}};
  if (p.enforce_staleness) j["protocol"]["enforce_staleness"] = *p.enforce_staleness;
  if (c.analysis) j["analysis"] = analysis_to_json(*c.analysis);
  if (c.sweep) j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::unique_ptr<Task> make_task(const ExperimentConfig& config) {
  const CounterRng rng(config.seed);
  if (config.learning.task == TaskKind::kQuadratic) {
    return std::make_unique<QuadraticTask>(QuadraticTask::generate(config.learning.quadratic, rng));
  }
  return std::make_unique<ClassificationTask>(
      ClassificationTask::generate(config.learning.classification, rng));
}

Vec initial_model(const ExperimentConfig& config, const Task& task) {
  Vec w = Vec::Zero(static_cast<Eigen::Index>(task.dim()));
  if (config.learning.w0_scale > 0.0) {
    auto engine = CounterRng(config.seed).engine(Stream::kTask, 3);
    std::normal_distribution<double> normal(0.0, config.learning.w0_scale);
    for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = normal(engine);
  }
  return w;
}

namespace {

double eta_min(const ExperimentConfig& config) {
  double out = 1.0;
  for (const auto& p : config.population.profiles) out = std::min(out, p.eta);
  return out;
}

}  // namespace

std::size_t resolve_K(const ExperimentConfig& config) {
  if (config.protocol.K) return *config.protocol.K;
  return estimate_K_A(*config.analysis, config.protocol.epsilon, eta_min(config),
                      static_cast<double>(config.protocol.S))
      .K;
}

std::size_t resolve_A(const ExperimentConfig& config) {
  if (config.protocol.A) return *config.protocol.A;
  const auto est = estimate_K_A(*config.analysis, config.protocol.epsilon, eta_min(config),
                                static_cast<double>(config.protocol.S));
  return std::min(est.A, config.population.n);
}

RunConfig make_run_config(const ExperimentConfig& config, Mode mode) {
  RunConfig r;
  r.mode = mode;
  r.objective = config.protocol.objective;
  r.A = mode == Mode::kSemiSync ? resolve_A(config) : 1;
  r.S = config.protocol.S;
  r.K = resolve_K(config);
  r.alpha = config.learning.alpha;
  r.beta = config.learning.beta;
  r.policy = config.protocol.policy;
  r.theta = config.protocol.theta;
  r.seed = config.seed;
  r.batches = config.learning.batches;
  r.payload = config.learning.payload;
  r.redistribution = config.protocol.redistribution;
  r.enforce_staleness = config.protocol.enforce_staleness;
  r.workers = config.workers;
  return r.normalized(config.population.n);
}

}  // namespace ssfl
