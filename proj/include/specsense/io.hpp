#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "specsense/experiments.hpp"
#include "specsense/spectrum.hpp"

namespace specsense {
namespace io {

inline constexpr const char* kToolVersion = "specsense 0.1.0";

inline constexpr const char* kResultsCsvHeader =
    "experiment,n,epsilon,gamma,M,K,T,trials,err_emp,err_lo,err_hi,err_theory,"
    "mean_samples,fail_picked_occupied,fail_insufficient,fail_budget";

inline constexpr const char* kTraceCsvHeader = "cycle,k,holes_retained,occupied_retained";

/// Fixed shortest-ish decimal rendering; deterministic for identical doubles,
/// which is what makes rerun CSV output byte-comparable.
inline std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

inline std::string results_csv_string(const std::vector<experiments::ResultRow>& rows) {
  std::string out(kResultsCsvHeader);
  out.push_back('\n');
  for (const auto& row : rows) {
    out += row.experiment;
    out.push_back(',');
    out += std::to_string(row.n);
    out.push_back(',');
    out += format_double(row.epsilon);
    out.push_back(',');
    out += format_double(row.gamma);
    out.push_back(',');
    out += format_double(row.m);
    out.push_back(',');
    out += std::to_string(row.k);
    out.push_back(',');
    out += std::to_string(row.t);
    out.push_back(',');
    out += std::to_string(row.trials);
    out.push_back(',');
    out += format_double(row.err_emp);
    out.push_back(',');
    out += format_double(row.err_lo);
    out.push_back(',');
    out += format_double(row.err_hi);
    out.push_back(',');
    out += format_double(row.err_theory);
    out.push_back(',');
    out += format_double(row.mean_samples);
    out.push_back(',');
    out += std::to_string(row.fail_picked_occupied);
    out.push_back(',');
    out += std::to_string(row.fail_insufficient);
    out.push_back(',');
    out += std::to_string(row.fail_budget);
    out.push_back('\n');
  }
  return out;
}

inline std::string trace_csv_string(const experiments::TraceResult& trace) {
  std::string out(kTraceCsvHeader);
  out.push_back('\n');
  for (const auto& row : trace.rows) {
    out += std::to_string(row.cycle);
    out.push_back(',');
    out += std::to_string(trace.configured_cycles);
    out.push_back(',');
    out += std::to_string(row.holes);
    out.push_back(',');
    out += std::to_string(row.occupied);
    out.push_back('\n');
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_results_csv(const std::string& path,
                              const std::vector<experiments::ResultRow>& rows) {
  write_text_file(path, results_csv_string(rows));
}

inline void write_trace_csv(const std::string& path,
                            const experiments::TraceResult& trace) {
  write_text_file(path, trace_csv_string(trace));
}

// ---------------------------------------------------------------------------
// Realization replay document
// ---------------------------------------------------------------------------

inline nlohmann::json realization_to_json(const Realization& real) {
  nlohmann::json doc;
  doc["n"] = real.n();
  doc["occupancy"] = real.occupancy;
  doc["powers"] = real.powers;
  return doc;
}

inline Realization realization_from_json(const nlohmann::json& doc) {
  Realization real;
  const auto n = doc.at("n").get<std::int64_t>();
  real.occupancy = doc.at("occupancy").get<std::vector<std::uint8_t>>();
  real.powers = doc.at("powers").get<std::vector<double>>();
  if (n < 1 || static_cast<std::int64_t>(real.occupancy.size()) != n ||
      static_cast<std::int64_t>(real.powers.size()) != n)
    throw std::invalid_argument("realization document: inconsistent lengths");
  for (std::size_t i = 0; i < real.occupancy.size(); ++i) {
    if (real.occupancy[i] > 1)
      throw std::invalid_argument("realization document: occupancy must be 0/1");
    if (real.occupancy[i] == 0 && real.powers[i] != 0.0)
      throw std::invalid_argument("realization document: hole with nonzero power");
    if (real.occupancy[i] == 1 && !(real.powers[i] > 0.0))
      throw std::invalid_argument("realization document: occupied channel needs positive power");
  }
  return real;
}

// ---------------------------------------------------------------------------
// Run metadata sidecar
// ---------------------------------------------------------------------------

inline std::string metadata_path(const std::string& output_path) {
  return output_path + ".meta.json";
}

/// Initial sidecar document: status stays "incomplete" until the run
/// finalizes it, so an interrupted run is recognizable from disk.
inline nlohmann::json make_run_metadata(const std::string& experiment,
                                        std::uint64_t master_seed,
                                        nlohmann::json params) {
  nlohmann::json doc;
  doc["status"] = "incomplete";
  doc["tool"] = kToolVersion;
  doc["experiment"] = experiment;
  doc["master_seed"] = master_seed;
  doc["params"] = std::move(params);
  return doc;
}

inline void write_json_file(const std::string& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return nlohmann::json::parse(in);
}

}  // namespace io
}  // namespace specsense
