/*
 * Copyright 2026 The jbal Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "jbal/datagen.h"
#include "jbal/errors.h"

namespace jbal {
namespace {

using nlohmann::json;

std::string Format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> SplitCommas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseDouble(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": bad number '" + text + "'");
  }
}

int ParseLabel(const std::string& text, std::size_t line) {
  if (text == "0") return 0;
  if (text == "1") return 1;
  throw ParseError("line " + std::to_string(line) + ": label must be 0 or 1, got '" + text + "'");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

}  // namespace

std::string SerializeDatasetCsv(const Dataset& data) {
  data.Validate();
  std::string out = data.v ? "y,z,v,weight" : "y,z,weight";
  for (std::size_t j = 0; j < data.dim(); ++j) out += ",x" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += std::to_string(data.y[i]);
    out += ',';
    out += std::to_string(data.z[i]);
    if (data.v) {
      out += ',';
      out += std::to_string((*data.v)[i]);
    }
    out += ',';
    out += Format(data.weights[i]);
    for (std::size_t j = 0; j < data.dim(); ++j) {
      out += ',';
      out += Format(data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += '\n';
  }
  return out;
}

Dataset ParseDatasetCsv(const std::string& text, std::vector<ChannelSlice> channels) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty dataset file");
  const std::vector<std::string> header = SplitCommas(line);
  if (header.size() < 3 || header[0] != "y" || header[1] != "z") {
    throw ParseError("dataset header must start with y,z");
  }
  const bool has_v = header[2] == "v";
  const std::size_t lead = has_v ? 4 : 3;
  if (header.size() < lead || header[lead - 1] != "weight") {
    throw ParseError("dataset header is missing the weight column");
  }
  const std::size_t dim = header.size() - lead;
  for (std::size_t j = 0; j < dim; ++j) {
    if (header[lead + j] != "x" + std::to_string(j)) {
      throw ParseError("unexpected feature column '" + header[lead + j] + "'");
    }
  }
  Dataset out;
  if (has_v) out.v.emplace();
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> fields = SplitCommas(line);
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    out.y.push_back(ParseLabel(fields[0], lineno));
    out.z.push_back(ParseLabel(fields[1], lineno));
    if (has_v) out.v->push_back(ParseLabel(fields[2], lineno));
    out.weights.push_back(ParseDouble(fields[lead - 1], lineno));
    for (std::size_t j = 0; j < dim; ++j) values.push_back(ParseDouble(fields[lead + j], lineno));
  }
  out.x = Eigen::Map<RowMatrix>(values.data(), static_cast<Eigen::Index>(out.y.size()),
                                static_cast<Eigen::Index>(dim));
  out.channels = std::move(channels);
  out.Validate();
  return out;
}

std::string SerializeDatasetMetadata(const GenSpec& spec,
                                     const std::vector<ChannelSlice>& channels,
                                     std::string_view config_hash) {
  json doc;
  doc["format"] = "jbal-dataset 1";
  if (!config_hash.empty()) doc["config_hash"] = std::string(config_hash);
  json& g = doc["gen"];
  g["graph"] = GraphName(spec.graph);
  g["n"] = spec.n;
  g["p_y1"] = spec.p_y1;
  g["p_z0_given_y0"] = spec.p_z0_given_y0;
  g["p_z0_given_y1"] = spec.p_z0_given_y1;
  g["p_v0_given_y0"] = spec.p_v0_given_y0;
  g["p_v0_given_y1"] = spec.p_v0_given_y1;
  g["v_coupling"] = spec.v_coupling;
  g["u_association"] = spec.u_association;
  g["lambda"] = spec.lambda;
  g["dim_core"] = spec.dim_core;
  g["dim_aux"] = spec.dim_aux;
  g["dim_v"] = spec.dim_v;
  g["sep_core"] = spec.sep_core;
  g["sep_aux"] = spec.sep_aux;
  g["sep_v"] = spec.sep_v;
  g["noise_core"] = spec.noise_core;
  g["noise_aux"] = spec.noise_aux;
  g["noise_v"] = spec.noise_v;
  g["label_noise"] = spec.label_noise;
  g["seed"] = spec.seed;
  json slices = json::array();
  for (const ChannelSlice& c : channels) {
    slices.push_back({{"name", c.name}, {"begin", c.begin}, {"end", c.end}});
  }
  doc["channels"] = slices;
  return doc.dump(2) + "\n";
}

void ParseDatasetMetadata(const std::string& text, GenSpec* spec,
                          std::vector<ChannelSlice>* channels) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "jbal-dataset 1") throw ParseError("unknown dataset metadata format");
    if (spec != nullptr) {
      const json& g = doc.at("gen");
      GenSpec s;
      s.graph = ParseGraphId(g.at("graph").get<std::string>());
      s.n = g.at("n").get<std::size_t>();
      s.p_y1 = g.at("p_y1").get<double>();
      s.p_z0_given_y0 = g.at("p_z0_given_y0").get<double>();
      s.p_z0_given_y1 = g.at("p_z0_given_y1").get<double>();
      s.p_v0_given_y0 = g.at("p_v0_given_y0").get<double>();
      s.p_v0_given_y1 = g.at("p_v0_given_y1").get<double>();
      s.v_coupling = g.at("v_coupling").get<double>();
      s.u_association = g.at("u_association").get<double>();
      s.lambda = g.at("lambda").get<double>();
      s.dim_core = g.at("dim_core").get<std::size_t>();
      s.dim_aux = g.at("dim_aux").get<std::size_t>();
      s.dim_v = g.at("dim_v").get<std::size_t>();
      s.sep_core = g.at("sep_core").get<double>();
      s.sep_aux = g.at("sep_aux").get<double>();
      s.sep_v = g.at("sep_v").get<double>();
      s.noise_core = g.at("noise_core").get<double>();
      s.noise_aux = g.at("noise_aux").get<double>();
      s.noise_v = g.at("noise_v").get<double>();
      s.label_noise = g.at("label_noise").get<double>();
      s.seed = g.at("seed").get<std::uint64_t>();
      *spec = s;
    }
    if (channels != nullptr) {
      channels->clear();
      for (const json& c : doc.at("channels")) {
        channels->push_back({c.at("name").get<std::string>(), c.at("begin").get<std::size_t>(),
                             c.at("end").get<std::size_t>()});
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("dataset metadata: ") + e.what());
  }
}

void WriteDataset(const std::string& path_prefix, const GenSpec& spec, const Dataset& data,
                  std::string_view config_hash) {
  const std::filesystem::path parent = std::filesystem::path(path_prefix).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  WriteFile(path_prefix + ".csv", SerializeDatasetCsv(data));
  WriteFile(path_prefix + ".meta.json", SerializeDatasetMetadata(spec, data.channels, config_hash));
}

Dataset ReadDataset(const std::string& path_prefix, GenSpec* spec) {
  std::vector<ChannelSlice> channels;
  ParseDatasetMetadata(ReadFile(path_prefix + ".meta.json"), spec, &channels);
  return ParseDatasetCsv(ReadFile(path_prefix + ".csv"), std::move(channels));
}

}  // namespace jbal
