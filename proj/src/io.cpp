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


#include "ssfl/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ssfl/analysis.hpp"
#include "ssfl/error.hpp"

namespace ssfl {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> lines(std::string_view text) {
  std::vector<std::string> out;
  for (auto& line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(std::move(line));
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw DomainError("not a number: '" + s + "'");
  return v;
}

std::size_t parse_index(const std::string& s) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw DomainError("not an index: '" + s + "'");
  }
  if (used != s.size()) throw DomainError("not an index: '" + s + "'");
  return static_cast<std::size_t>(v);
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (j) out += ';';
    out += std::to_string(values[j]);
  }
  return out;
}

std::vector<std::size_t> parse_list(const std::string& s) {
  std::vector<std::size_t> out;
  if (s.empty()) return out;
  for (const auto& part : split(s, ';')) out.push_back(parse_index(part));
  return out;
}

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string schedule_to_csv(const SchedulingMatrix& matrix) {
  std::string out;
  for (std::size_t i = 0; i < matrix.ues(); ++i) {
    if (i) out += ',';
    out += "ue_" + std::to_string(i);
  }
  out += '\n';
  for (std::size_t k = 0; k < matrix.rounds(); ++k) {
    for (std::size_t i = 0; i < matrix.ues(); ++i) {
      if (i) out += ',';
      out += matrix.at(k, i) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

SchedulingMatrix schedule_from_csv(std::string_view text, std::size_t staleness_bound) {
  const auto rows = lines(text);
  if (rows.empty()) throw DomainError("schedule CSV is empty");
  const auto header = split(rows[0], ',');
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != "ue_" + std::to_string(i)) throw DomainError("bad schedule header");
  }
  const std::size_t n = header.size();
  std::vector<std::uint8_t> cells;
  std::size_t participants = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto cols = split(rows[r], ',');
    if (cols.size() != n) throw DomainError("ragged schedule row");
    std::size_t sum = 0;
    for (const auto& c : cols) {
      if (c != "0" && c != "1") throw DomainError("schedule entries must be 0 or 1");
      cells.push_back(c == "1");
      sum += c == "1";
    }
    if (r == 1) participants = sum;
  }
  const std::size_t k = rows.size() - 1;
  if (k == 0) throw DomainError("schedule CSV has no rounds");
  return SchedulingMatrix(k, n, participants, staleness_bound ? staleness_bound : k,
                          std::move(cells));
}

std::string plan_to_csv(const BandwidthPlan& plan) {
  std::string out = "round,ue,share_hz\n";
  for (Eigen::Index k = 0; k < plan.shares_hz.rows(); ++k) {
    for (Eigen::Index i = 0; i < plan.shares_hz.cols(); ++i) {
      out += std::to_string(k) + ',' + std::to_string(i) + ',' +
             format_number(plan.shares_hz(k, i)) + '\n';
    }
  }
  return out;
}

BandwidthPlan plan_from_csv(std::string_view text, BandwidthPolicy policy) {
  const auto rows = lines(text);
  if (rows.empty() || rows[0] != "round,ue,share_hz") throw DomainError("bad plan header");
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  std::size_t k_max = 0;
  std::size_t i_max = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto cols = split(rows[r], ',');
    if (cols.size() != 3) throw DomainError("plan rows need 3 columns");
    entries.emplace_back(parse_index(cols[0]), parse_index(cols[1]), parse_double(cols[2]));
    k_max = std::max(k_max, std::get<0>(entries.back()) + 1);
    i_max = std::max(i_max, std::get<1>(entries.back()) + 1);
  }
  if (entries.size() != k_max * i_max) throw DomainError("plan CSV is not a full K x n grid");
  BandwidthPlan plan;
  plan.policy = policy;
  plan.shares_hz = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k_max),
                                         static_cast<Eigen::Index>(i_max));
  for (const auto& [k, i, b] : entries) {
    plan.shares_hz(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = b;
  }
  return plan;
}

std::string trace_to_csv(const SimTrace& trace) {
  std::string out =
      "round,close_time_s,participants,max_staleness,loss,grad_norm_sq,accuracy,staleness\n";
  for (const RoundRecord& r : trace.rounds) {
    out += std::to_string(r.round) + ',' + format_number(r.close_time_s) + ',' +
           join(r.participants) + ',' + std::to_string(r.max_staleness()) + ',' +
           format_number(r.loss) + ',' + format_number(r.grad_norm_sq) + ',' +
           (r.accuracy ? format_number(*r.accuracy) : std::string()) + ',' + join(r.staleness) +
           '\n';
  }
  return out;
}

std::vector<RoundRecord> trace_from_csv(std::string_view text) {
  const auto rows = lines(text);
  if (rows.empty() ||
      rows[0] != "round,close_time_s,participants,max_staleness,loss,grad_norm_sq,accuracy,staleness") {
    throw DomainError("bad trace header");
  }
  std::vector<RoundRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto cols = split(rows[r], ',');
    if (cols.size() != 8) throw DomainError("trace rows need 8 columns");
    RoundRecord rec;
    rec.round = parse_index(cols[0]);
    rec.close_time_s = parse_double(cols[1]);
    rec.participants = parse_list(cols[2]);
    rec.loss = parse_double(cols[4]);
    rec.grad_norm_sq = parse_double(cols[5]);
    if (!cols[6].empty()) rec.accuracy = parse_double(cols[6]);
    rec.staleness = parse_list(cols[7]);
    if (rec.staleness.size() != rec.participants.size() ||
        rec.max_staleness() != parse_index(cols[3])) {
      throw DomainError("inconsistent staleness columns in trace row " + std::to_string(r));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

nlohmann::json trace_summary(const SimTrace& trace, double epsilon) {
  nlohmann::json j;
  j["mode"] = std::string(to_string(trace.mode));
  j["objective"] = std::string(to_string(trace.objective));
  j["A"] = trace.A;
  j["S"] = trace.S;
  j["rounds"] = trace.rounds.size();
  j["total_time_s"] = total_time(trace);
  const bool any = !trace.rounds.empty();
  j["final_loss"] = any ? trace.rounds.back().loss : trace.initial_loss;
  j["final_grad_norm_sq"] = any ? trace.rounds.back().grad_norm_sq : trace.initial_grad_norm_sq;
  const auto acc = any ? trace.rounds.back().accuracy : trace.initial_accuracy;
  j["final_accuracy"] = acc ? nlohmann::json(*acc) : nlohmann::json(nullptr);
  const double avg = average_grad_norm_sq(trace);
  j["avg_grad_norm_sq"] = avg;
  j["epsilon"] = epsilon;
  j["fosp"] = fosp_check(avg, epsilon);
  j["max_staleness"] = trace.max_staleness();
  j["redistributions"] = trace.redistributions;
  j["abandoned_uploads"] = trace.abandoned_uploads;
  j["flags"] = trace.flags;
  return j;
}

}  // namespace ssfl
