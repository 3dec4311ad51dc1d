// Copyright 2026 The parares Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "output.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace parares::cli {

using nlohmann::json;

void Table::add_row(std::vector<json> row) {
  if (row.size() != columns.size()) throw std::logic_error("table: row width mismatch");
  rows.push_back(std::move(row));
}

std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_number(v.get<double>());
  const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
  for (const auto& [key, value] : table.metadata) {
    out << "# " << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump())
        << '\n';
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << '\n';
  }
}

void write_json(std::ostream& out, const Table& table) {
  json meta = json::object();
  for (const auto& [key, value] : table.metadata) meta[key] = value;
  json doc = {{"metadata", meta}, {"columns", table.columns}, {"rows", table.rows}};
  out << doc.dump(1) << '\n';
}

void write_table(const std::string& path, const std::string& format, const Table& table) {
  auto emit = [&](std::ostream& out) {
    if (format == "json") {
      write_json(out, table);
    } else {
      write_csv(out, table);
    }
  };
  if (path == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  emit(out);
  if (!out.flush()) throw std::runtime_error("failed writing " + path);
}

json verdict_json(const sweep::PointVerdict& v) {
  json j = {{"omega", v.omega},
            {"epsilon", v.epsilon},
            {"verdict", std::string(sweep::to_string(v.verdict))},
            {"fitted_exponent", v.fitted_exponent},
            {"exponent_stderr", v.exponent_stderr},
            {"r_squared", v.r_squared},
            {"max_amplitude", v.max_amplitude},
            {"escaped", v.escaped},
            {"periods", v.periods},
            {"diagnostic", v.diagnostic},
            {"cycle_state", nullptr}};
  if (v.cycle_state) {
    j["cycle_state"] = {{"coordinates", v.cycle_state->coordinates},
                        {"velocities", v.cycle_state->velocities},
                        {"time", v.cycle_state->time},
                        {"dim", v.cycle_state->dim}};
  }
  return j;
}

sweep::PointVerdict verdict_from_json(const json& j) {
  sweep::PointVerdict v;
  v.omega = j.at("omega").get<double>();
  v.epsilon = j.at("epsilon").get<double>();
  const auto name = j.at("verdict").get<std::string>();
  bool known = false;
  for (const auto candidate : {sweep::Verdict::Stable, sweep::Verdict::Resonant,
                               sweep::Verdict::LimitCycle, sweep::Verdict::Inconclusive}) {
    if (sweep::to_string(candidate) == name) {
      v.verdict = candidate;
      known = true;
    }
  }
  if (!known) throw std::invalid_argument("manifest: unknown verdict " + name);
  v.fitted_exponent = j.at("fitted_exponent").get<double>();
  v.exponent_stderr = j.at("exponent_stderr").get<double>();
  v.r_squared = j.at("r_squared").get<double>();
  v.max_amplitude = j.at("max_amplitude").get<double>();
  v.escaped = j.at("escaped").get<bool>();
  v.periods = j.at("periods").get<int>();
  v.diagnostic = j.at("diagnostic").get<std::string>();
  if (const auto& c = j.at("cycle_state"); !c.is_null()) {
    DynamicalState s;
    s.coordinates = c.at("coordinates").get<std::array<double, 3>>();
    s.velocities = c.at("velocities").get<std::array<double, 3>>();
    s.time = c.at("time").get<double>();
    s.dim = c.at("dim").get<int>();
    v.cycle_state = s;
  }
  return v;
}

Manifest::Manifest(std::string path, const std::string& fingerprint, std::size_t cells)
    : path_(std::move(path)), completed_(cells) {
  const json header = {{"manifest", 1}, {"fingerprint", fingerprint}, {"cells", cells}};
  std::ifstream in(path_);
  if (in) {
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error&) {
        if (in.peek() == std::char_traits<char>::eof()) break;
        throw std::invalid_argument("manifest " + path_ + ": corrupt line");
      }
      if (first) {
        if (j != header) {
          throw std::invalid_argument("manifest " + path_ +
                                      " belongs to a different configuration; remove it to restart");
        }
        first = false;
        continue;
      }
      const auto index = j.at("index").get<std::size_t>();
      if (index >= cells) throw std::invalid_argument("manifest " + path_ + ": index out of range");
      completed_[index] = verdict_from_json(j.at("cell"));
    }
    if (!first) {
      // Rewrite to drop a truncated tail before appending.
      std::ofstream out(path_, std::ios::trunc);
      out << header.dump() << '\n';
      for (std::size_t i = 0; i < cells; ++i) {
        if (completed_[i]) out << json{{"index", i}, {"cell", verdict_json(*completed_[i])}}.dump() << '\n';
      }
      return;
    }
  }
  std::ofstream out(path_, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create manifest " + path_);
  out << header.dump() << '\n';
}

std::size_t Manifest::completed_count() const {
  std::size_t n = 0;
  for (const auto& c : completed_) n += c.has_value();
  return n;
}

void Manifest::record(std::size_t index, const sweep::PointVerdict& v) {
  completed_[index] = v;
  std::ofstream out(path_, std::ios::app);
  out << json{{"index", index}, {"cell", verdict_json(v)}}.dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("failed writing manifest " + path_);
}

}  // namespace parares::cli
