// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarmix/distribution.hpp"

namespace polarmix {

/// Parse the distribution JSON document (the counterpart of to_json).
inline RuntimeDistribution distribution_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<double> bp = j.at("breakpoints").get<std::vector<double>>();
  std::vector<ChebSeries> segs;
  for (const auto& sj : j.at("segments"))
    segs.emplace_back(sj.get<std::vector<double>>());
  std::vector<Atom> atoms;
  for (const auto& aj : j.at("atoms"))
    atoms.push_back({aj.at(0).get<double>(), aj.at(1).get<double>()});
  return RuntimeDistribution(std::move(bp), std::move(segs),
                             std::move(atoms));
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

/// One-column (or first-column) CSV of runtime samples; header row optional.
inline std::vector<double> samples_from_csv(const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string field = line.substr(0, line.find(','));
    try {
      std::size_t pos = 0;
      double v = std::stod(field, &pos);
      if (pos == field.size()) out.push_back(v);
    } catch (const std::exception&) {
      // tolerate a header row
    }
  }
  if (out.empty()) throw std::runtime_error("samples csv: no numeric rows");
  return out;
}

/// Distribution mini-language: uniform:a,b | exp:mean | file:path.json |
/// samples:path.csv
inline RuntimeDistribution parse_distribution_spec(const std::string& spec) {
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "uniform") {
    auto comma = arg.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("dist: uniform needs a,b");
    return RuntimeDistribution::uniform(std::stod(arg.substr(0, comma)),
                                        std::stod(arg.substr(comma + 1)));
  }
  if (kind == "exp") {
    if (arg.empty()) throw std::invalid_argument("dist: exp needs a mean");
    return RuntimeDistribution::exponential(std::stod(arg));
  }
  if (kind == "file") return distribution_from_json(read_file(arg));
  if (kind == "samples")
    return EmpiricalDistribution(samples_from_csv(read_file(arg)))
        .to_runtime();
  throw std::invalid_argument("dist: unknown kind '" + kind + "'");
}

}  // namespace polarmix
