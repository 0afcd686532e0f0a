#include "regret_pricer/instance_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "regret_pricer/errors.hpp"

namespace regret_pricer::io {

double round_significant(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

json number(double v) { return round_significant(v); }

json number_array(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

int require_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw InvalidInput(std::string("instance field '") + key + "' must be an integer");
  }
  return j[key].get<int>();
}

Matrix read_matrix(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw InvalidInput(std::string("instance field '") + key + "' must be a matrix");
  }
  std::vector<std::vector<double>> rows;
  for (const auto& row : j[key]) {
    if (!row.is_array()) throw InvalidInput(std::string("rows of '") + key + "' must be arrays");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw InvalidInput(std::string("'") + key + "' holds a non-number");
      r.push_back(v.get<double>());
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw InvalidInput(std::string("'") + key + "' is empty");
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) {
      throw InvalidInput(std::string("'") + key + "' is ragged");
    }
  }
  return Matrix::from_rows(rows);
}

}  // namespace

RawInstance parse_instance(const json& j) {
  if (!j.is_object()) throw InvalidInput("instance must be a JSON object");
  RawInstance raw;
  raw.n_buyers = require_int(j, "buyers");
  raw.m_items = require_int(j, "items");
  if (j.contains("demands")) {
    if (!j["demands"].is_array()) throw InvalidInput("'demands' must be an array");
    for (const auto& d : j["demands"]) {
      if (!d.is_number_integer()) throw InvalidInput("demands must be integers");
      raw.demands.push_back(d.get<int>());
    }
  }
  const std::string kind = j.value("kind", std::string());
  if (kind == "interval") {
    raw.lower = read_matrix(j, "lower");
    raw.upper = read_matrix(j, "upper");
  } else if (kind == "deterministic") {
    raw.lower = read_matrix(j, "valuations");
  } else {
    throw InvalidInput("instance 'kind' must be \"interval\" or \"deterministic\"");
  }
  // Shapes and values are checked by normalization.
  normalize_instance(raw);
  return raw;
}

json instance_json(const RawInstance& raw) {
  json j;
  j["kind"] = raw.upper ? "interval" : "deterministic";
  j["buyers"] = raw.n_buyers;
  j["items"] = raw.m_items;
  if (!raw.demands.empty()) j["demands"] = raw.demands;
  if (raw.upper) {
    j["lower"] = matrix_json(raw.lower);
    j["upper"] = matrix_json(*raw.upper);
  } else {
    j["valuations"] = matrix_json(raw.lower);
  }
  return j;
}

json instance_json(const IntervalUncertainty& s) {
  RawInstance raw;
  raw.n_buyers = raw.m_items = s.k();
  raw.lower = s.lower().matrix();
  raw.upper = s.upper().matrix();
  return instance_json(raw);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
  if (!out) throw InvalidInput("write to " + path + " failed");
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + '\n'; }

}  // namespace regret_pricer::io
