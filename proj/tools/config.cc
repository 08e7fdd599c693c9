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

#include "config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace jbal::cli {
namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Key {
  const char* name;
  Setter set;
  Getter get;
};

struct Section {
  const char* name;
  std::vector<Key> keys;
};

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitList(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (item.empty()) throw UsageError("empty list item in '" + v + "'");
    out.push_back(item);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

double ToDouble(const std::string& v) {
  double out = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw UsageError("expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t ToUnsigned(const std::string& v) {
  std::uint64_t out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw UsageError("expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool ToBool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw UsageError("expected true or false, got '" + v + "'");
}

std::string Num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string Num(std::uint64_t v) { return std::to_string(v); }

std::string Bool(bool v) { return v ? "true" : "false"; }

template <typename Out>
Out Wrap(const std::function<Out()>& f) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

#define DOUBLE_KEY(sec, field)                                                     \
  Key{#field, [](ExperimentConfig& c, const std::string& v) { c.sec.field = ToDouble(v); }, \
      [](const ExperimentConfig& c) { return Num(c.sec.field); }}
#define SIZE_KEY(sec, field)                                                               \
  Key{#field,                                                                              \
      [](ExperimentConfig& c, const std::string& v) {                                      \
        c.sec.field = static_cast<std::size_t>(ToUnsigned(v));                             \
      },                                                                                   \
      [](const ExperimentConfig& c) { return Num(static_cast<std::uint64_t>(c.sec.field)); }}

const std::vector<Section>& Schema() {
  static const std::vector<Section> schema = {
      {"gen",
       {
           Key{"graph",
               [](ExperimentConfig& c, const std::string& v) {
                 c.gen.graph = Wrap<GraphId>([&] { return ParseGraphId(v); });
               },
               [](const ExperimentConfig& c) { return std::string(GraphName(c.gen.graph)); }},
           SIZE_KEY(gen, n),
           DOUBLE_KEY(gen, p_y1),
           DOUBLE_KEY(gen, p_z0_given_y0),
           DOUBLE_KEY(gen, p_z0_given_y1),
           DOUBLE_KEY(gen, p_v0_given_y0),
           DOUBLE_KEY(gen, p_v0_given_y1),
           DOUBLE_KEY(gen, v_coupling),
           DOUBLE_KEY(gen, u_association),
           DOUBLE_KEY(gen, lambda),
           SIZE_KEY(gen, dim_core),
           SIZE_KEY(gen, dim_aux),
           SIZE_KEY(gen, dim_v),
           DOUBLE_KEY(gen, sep_core),
           DOUBLE_KEY(gen, sep_aux),
           DOUBLE_KEY(gen, sep_v),
           DOUBLE_KEY(gen, noise_core),
           DOUBLE_KEY(gen, noise_aux),
           DOUBLE_KEY(gen, noise_v),
           DOUBLE_KEY(gen, label_noise),
       }},
      {"balance",
       {Key{"mechanism",
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "none") {
                c.balance.reset();
              } else {
                c.balance = Wrap<Mechanism>([&] { return ParseMechanism(v); });
              }
            },
            [](const ExperimentConfig& c) {
              return std::string(c.balance ? MechanismName(*c.balance) : "none");
            }}}},
      {"train",
       {
           Key{"arch",
               [](ExperimentConfig& c, const std::string& v) {
                 c.train.arch = Wrap<Architecture>([&] { return ParseArchitecture(v); });
               },
               [](const ExperimentConfig& c) { return std::string(ArchitectureName(c.train.arch)); }},
           SIZE_KEY(train, hidden),
           SIZE_KEY(train, epochs),
           SIZE_KEY(train, batch_size),
           DOUBLE_KEY(train, learning_rate),
           DOUBLE_KEY(train, momentum),
           DOUBLE_KEY(train, l2),
           Key{"mmd_mode",
               [](ExperimentConfig& c, const std::string& v) {
                 c.train.mmd.mode = Wrap<MmdMode>([&] { return ParseMmdMode(v); });
               },
               [](const ExperimentConfig& c) { return std::string(MmdModeName(c.train.mmd.mode)); }},
           Key{"mmd_strength",
               [](ExperimentConfig& c, const std::string& v) { c.train.mmd.strength = ToDouble(v); },
               [](const ExperimentConfig& c) { return Num(c.train.mmd.strength); }},
           Key{"mmd_bandwidth",
               [](ExperimentConfig& c, const std::string& v) { c.train.mmd.bandwidth = ToDouble(v); },
               [](const ExperimentConfig& c) { return Num(c.train.mmd.bandwidth); }},
           Key{"mmd_on_representation",
               [](ExperimentConfig& c, const std::string& v) {
                 c.train.mmd.on_representation = ToBool(v);
               },
               [](const ExperimentConfig& c) { return Bool(c.train.mmd.on_representation); }},
       }},
      {"eval",
       {
           Key{"sets",
               [](ExperimentConfig& c, const std::string& v) {
                 c.eval_sets.clear();
                 for (const std::string& s : SplitList(v)) {
                   if (s == "source") {
                     c.eval_sets.push_back(TestSetKind::kSource);
                   } else if (s == "ideal") {
                     c.eval_sets.push_back(TestSetKind::kIdeal);
                   } else if (s == "shift") {
                     c.eval_sets.push_back(TestSetKind::kShift);
                   } else {
                     throw UsageError("unknown test set '" + s + "' (source, ideal, shift)");
                   }
                 }
               },
               [](const ExperimentConfig& c) {
                 std::string out;
                 for (TestSetKind k : c.eval_sets) out += (out.empty() ? "" : ", ") + std::string(TestSetName(k));
                 return out;
               }},
           SIZE_KEY(eval, source_n),
           SIZE_KEY(eval, ideal_n),
           SIZE_KEY(eval, shift_points),
           SIZE_KEY(eval, shift_n),
           Key{"shift_loss",
               [](ExperimentConfig& c, const std::string& v) {
                 if (v == "zero_one") {
                   c.eval.shift_loss = EvalLoss::kZeroOne;
                 } else if (v == "logloss") {
                   c.eval.shift_loss = EvalLoss::kLogLoss;
                 } else {
                   throw UsageError("unknown loss '" + v + "' (zero_one, logloss)");
                 }
               },
               [](const ExperimentConfig& c) { return std::string(EvalLossName(c.eval.shift_loss)); }},
           Key{"probe",
               [](ExperimentConfig& c, const std::string& v) { c.eval.probe = ToBool(v); },
               [](const ExperimentConfig& c) { return Bool(c.eval.probe); }},
           Key{"threshold",
               [](ExperimentConfig& c, const std::string& v) { c.eval.options.threshold = ToDouble(v); },
               [](const ExperimentConfig& c) { return Num(c.eval.options.threshold); }},
           Key{"pp_bins",
               [](ExperimentConfig& c, const std::string& v) {
                 c.eval.options.pp_bins = static_cast<std::size_t>(ToUnsigned(v));
               },
               [](const ExperimentConfig& c) {
                 return Num(static_cast<std::uint64_t>(c.eval.options.pp_bins));
               }},
           Key{"min_stratum",
               [](ExperimentConfig& c, const std::string& v) {
                 c.eval.options.min_stratum = static_cast<std::size_t>(ToUnsigned(v));
               },
               [](const ExperimentConfig& c) {
                 return Num(static_cast<std::uint64_t>(c.eval.options.min_stratum));
               }},
       }},
      {"run",
       {
           Key{"replicates",
               [](ExperimentConfig& c, const std::string& v) {
                 c.replicates.clear();
                 for (const std::string& s : SplitList(v)) c.replicates.push_back(ToUnsigned(s));
               },
               [](const ExperimentConfig& c) {
                 std::string out;
                 for (std::uint64_t s : c.replicates) out += (out.empty() ? "" : ", ") + Num(s);
                 return out;
               }},
           Key{"output_dir",
               [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
               [](const ExperimentConfig& c) { return c.output_dir; }},
       }},
      {"grid",
       {
           Key{"strengths",
               [](ExperimentConfig& c, const std::string& v) {
                 c.strengths.clear();
                 for (const std::string& s : SplitList(v)) c.strengths.push_back(ToDouble(s));
               },
               [](const ExperimentConfig& c) {
                 std::string out;
                 for (double s : c.strengths) out += (out.empty() ? "" : ", ") + Num(s);
                 return out;
               }},
           Key{"balance",
               [](ExperimentConfig& c, const std::string& v) {
                 c.grid_balance.clear();
                 for (const std::string& s : SplitList(v)) {
                   if (s != "none" && s != "joint") {
                     throw UsageError("grid balance values are none and joint, got '" + s + "'");
                   }
                   c.grid_balance.push_back(s == "joint");
                 }
               },
               [](const ExperimentConfig& c) {
                 std::string out;
                 for (bool b : c.grid_balance) out += (out.empty() ? "" : ", ") + std::string(b ? "joint" : "none");
                 return out;
               }},
           Key{"mechanism",
               [](ExperimentConfig& c, const std::string& v) {
                 c.grid_mechanism = Wrap<Mechanism>([&] { return ParseMechanism(v); });
               },
               [](const ExperimentConfig& c) { return std::string(MechanismName(c.grid_mechanism)); }},
       }},
  };
  return schema;
}

#undef DOUBLE_KEY
#undef SIZE_KEY

const Key* FindKey(const Section& section, const std::string& name) {
  for (const Key& k : section.keys) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

std::string Canonical(const ExperimentConfig& config, bool with_output_dir) {
  std::string out;
  for (const Section& s : Schema()) {
    out += "[" + std::string(s.name) + "]\n";
    for (const Key& k : s.keys) {
      if (!with_output_dir && std::string_view(k.name) == "output_dir") continue;
      out += std::string(k.name) + " = " + k.get(config) + "\n";
    }
    out += "\n";
  }
  return out;
}

}  // namespace

const char* TestSetName(TestSetKind kind) {
  switch (kind) {
    case TestSetKind::kSource:
      return "source";
    case TestSetKind::kIdeal:
      return "ideal";
    case TestSetKind::kShift:
      return "shift";
  }
  return "?";
}

void ExperimentConfig::Validate() const {
  Wrap<int>([this] {
    ValidateGenSpec(gen);
    train.Validate();
    return 0;
  });
  if (gen.n == 0) throw UsageError("gen.n must be positive");
  if (replicates.empty()) throw UsageError("run.replicates must not be empty");
  if (eval_sets.empty()) throw UsageError("eval.sets must not be empty");
  for (TestSetKind k : eval_sets) {
    if (k == TestSetKind::kShift && eval.shift_points < 2) {
      throw UsageError("the shift test set needs eval.shift_points >= 2");
    }
  }
  if (eval.source_n == 0 || eval.ideal_n == 0 || eval.shift_n == 0) {
    throw UsageError("test set sizes must be positive");
  }
  if (eval.options.pp_bins == 0) throw UsageError("eval.pp_bins must be positive");
  if (!(eval.options.threshold > 0.0 && eval.options.threshold < 1.0)) {
    throw UsageError("eval.threshold must lie in (0, 1)");
  }
  if (strengths.empty() || grid_balance.empty()) throw UsageError("grid axes must not be empty");
  for (double s : strengths) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw UsageError("grid strengths must be >= 0");
  }
  if (output_dir.empty()) throw UsageError("run.output_dir must not be empty");
}

CellSpec ExperimentConfig::Cell(std::uint64_t seed) const {
  CellSpec c;
  c.gen = gen;
  c.balanced = balance.has_value();
  c.mechanism = balance.value_or(Mechanism::kSubsampleMajority);
  c.train = train;
  c.eval = eval;
  bool shift = false;
  for (TestSetKind k : eval_sets) shift = shift || k == TestSetKind::kShift;
  if (!shift) c.eval.shift_points = 0;
  c.seed = seed;
  return c;
}

ExperimentConfig ParseConfig(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError("config: " + std::string(e.what()));
  }
  ExperimentConfig config;
  // The graph fixes per-graph defaults, so it is applied before any other key.
  if (auto graph = tree.get_optional<std::string>("gen.graph")) {
    const GraphId id = Wrap<GraphId>([&] { return ParseGraphId(Trim(*graph)); });
    config.gen = GenSpec::Defaults(id);
  }
  for (const auto& [section_name, section_tree] : tree) {
    if (section_tree.empty()) {
      throw UsageError("config: key '" + section_name + "' outside of a section");
    }
    const Section* section = nullptr;
    for (const Section& s : Schema()) {
      if (section_name == s.name) section = &s;
    }
    if (section == nullptr) throw UsageError("config: unknown section [" + section_name + "]");
    for (const auto& [key, value] : section_tree) {
      const Key* k = FindKey(*section, key);
      if (k == nullptr) {
        throw UsageError("config: unknown key '" + key + "' in [" + section_name + "]");
      }
      try {
        k->set(config, Trim(value.data()));
      } catch (const UsageError& e) {
        throw UsageError("config: " + section_name + "." + key + ": " + e.what());
      }
    }
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str());
}

std::string CanonicalConfig(const ExperimentConfig& config) { return Canonical(config, true); }

std::string ConfigHash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : Canonical(config, false)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace jbal::cli
