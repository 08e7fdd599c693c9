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


// `jbal grid`: balance x strength x replicate cells, run in parallel,
// resumable through results.csv and manifest.json.

#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "commands.h"
#include "jbal/errors.h"
#include "jbal/experiment.h"

namespace jbal::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

const std::vector<std::string> kColumns = {
    "key",           "config_hash",        "graph",
    "balance",       "mechanism",          "mmd_mode",
    "mmd_strength",  "seed",               "train_rows",
    "final_loss",    "source_accuracy",    "source_worst_group",
    "ideal_accuracy", "ideal_worst_group", "ideal_worst_z_stratum",
    "ideal_equalized_odds", "ideal_dp_gap", "ideal_pp_gap",
    "ideal_encoding", "shift_max_gap"};

std::string Num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string Opt(const std::optional<double>& v) { return v ? Num(*v) : std::string(); }

std::string Join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

std::vector<std::string> Split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct GridCell {
  std::string key;
  bool balanced = false;
  double strength = 0.0;
  CellSpec spec;
};

bool Has(const ExperimentConfig& c, TestSetKind k) {
  for (TestSetKind e : c.eval_sets) {
    if (e == k) return true;
  }
  return false;
}

std::vector<GridCell> Cells(const ExperimentConfig& config) {
  std::vector<GridCell> cells;
  for (bool balanced : config.grid_balance) {
    for (double strength : config.strengths) {
      for (std::uint64_t seed : config.replicates) {
        GridCell g;
        g.balanced = balanced;
        g.strength = strength;
        g.key = std::string(balanced ? "joint" : "none") + "_s" + Num(strength) + "_r" +
                std::to_string(seed);
        g.spec = config.Cell(seed);
        g.spec.balanced = balanced;
        g.spec.mechanism = config.grid_mechanism;
        g.spec.train.mmd.strength = strength;
        cells.push_back(std::move(g));
      }
    }
  }
  return cells;
}

std::vector<std::string> Row(const GridCell& g, const std::string& hash, const CellResult& r,
                             const ExperimentConfig& config) {
  const bool src = Has(config, TestSetKind::kSource);
  const bool ideal = Has(config, TestSetKind::kIdeal);
  auto if_src = [&](double v) { return src ? Num(v) : std::string(); };
  auto if_ideal = [&](double v) { return ideal ? Num(v) : std::string(); };
  return {g.key,
          hash,
          GraphName(g.spec.gen.graph),
          g.balanced ? "joint" : "none",
          g.balanced ? MechanismName(g.spec.mechanism) : "",
          MmdModeName(g.spec.train.mmd.mode),
          Num(g.strength),
          std::to_string(g.spec.seed),
          std::to_string(r.train_rows),
          Num(r.training.log.back().loss),
          if_src(r.source.accuracy),
          if_src(r.source.worst_group),
          if_ideal(r.ideal.accuracy),
          if_ideal(r.ideal.worst_group),
          if_ideal(r.ideal.worst_z_stratum),
          if_ideal(r.ideal.equalized_odds),
          if_ideal(r.ideal.dp_gap),
          ideal ? Opt(r.ideal.pp_gap) : std::string(),
          ideal ? Opt(r.ideal.encoding) : std::string(),
          r.shift ? Num(r.shift->max_gap) : std::string()};
}

CellResult RunGridCell(const GridCell& g, const ExperimentConfig& config) {
  const Dataset train = CellBalance(CellTrainingData(g.spec), g.spec);
  CellResult out;
  out.train_rows = train.size();
  out.training = CellTrain(train, g.spec);
  CellTestsets tests = CellTestData(g.spec);
  if (!Has(config, TestSetKind::kSource)) tests.source = {};
  if (!Has(config, TestSetKind::kIdeal)) tests.ideal = {};
  EvaluateCell(out.training.params, tests, g.spec, &out);
  return out;
}

Json CellJson(const GridCell& g, const std::string& hash, const CellResult& r) {
  Json j;
  j["key"] = g.key;
  j["config_hash"] = hash;
  j["train_rows"] = r.train_rows;
  j["bandwidth"] = r.training.bandwidth;
  j["source"] = Json::parse(SerializeMetrics(r.source));
  j["ideal"] = Json::parse(SerializeMetrics(r.ideal));
  if (r.shift) {
    j["shift"]["risks"] = r.shift->risks;
    j["shift"]["max_gap"] = r.shift->max_gap;
  }
  return j;
}

struct Existing {
  std::set<std::string> done;
  std::vector<std::vector<std::string>> rows;
};

// Reads results.csv, dropping a trailing partial line left by an
// interrupted append. Rows of another config are a usage error.
Existing ReadResults(const fs::path& path, const std::string& hash) {
  Existing e;
  if (!fs::exists(path)) return e;
  std::string text = ReadTextFile(path);
  if (!text.empty() && text.back() != '\n') {
    text.erase(text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1);
    WriteFileAtomic(path, text);
  }
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return e;
  if (line != Join(kColumns)) {
    throw UsageError(path.string() + " has a different header; pass --force to start over");
  }
  while (std::getline(in, line)) {
    std::vector<std::string> f = Split(line);
    if (f.size() != kColumns.size()) throw Error("malformed row in " + path.string());
    if (f[1] != hash) {
      throw UsageError(path.string() + " holds results of config " + f[1] +
                       "; pass --force to start over");
    }
    e.done.insert(f[0]);
    e.rows.push_back(std::move(f));
  }
  return e;
}

std::set<std::string> ReadManifest(const fs::path& path, const std::string& hash) {
  std::set<std::string> done;
  if (!fs::exists(path)) return done;
  const Json m = Json::parse(ReadTextFile(path));
  if (m.at("config_hash").get<std::string>() != hash) {
    throw UsageError(path.string() + " belongs to config " +
                     m.at("config_hash").get<std::string>() + "; pass --force to start over");
  }
  for (const auto& k : m.at("completed")) done.insert(k.get<std::string>());
  return done;
}

void WriteManifest(const fs::path& path, const std::string& hash, std::size_t total,
                   const std::set<std::string>& done) {
  Json m;
  m["config_hash"] = hash;
  m["total_cells"] = total;
  m["completed"] = done;
  WriteFileAtomic(path, m.dump(2) + "\n");
}

// x = strength, y = mean over replicates of the column, series = balance.
std::string PlotData(const std::vector<std::vector<std::string>>& rows, const std::string& column) {
  std::size_t col = 0;
  while (kColumns[col] != column) ++col;
  std::map<std::pair<std::string, double>, std::pair<double, std::size_t>> acc;
  for (const auto& r : rows) {
    if (r[col].empty()) continue;
    auto& slot = acc[{r[3], std::stod(r[6])}];
    slot.first += std::stod(r[col]);
    ++slot.second;
  }
  std::string out = "x,y,series\n";
  for (const auto& [k, v] : acc) {
    out += Num(k.second) + "," + Num(v.first / static_cast<double>(v.second)) + "," + k.first + "\n";
  }
  return out;
}

}  // namespace

int CmdGrid(const Options& opts) {
  const RunContext ctx = ResolveRun(opts);
  const ExperimentConfig& config = ctx.config;
  if (config.train.mmd.mode == MmdMode::kNone) {
    for (double s : config.strengths) {
      if (s != 0.0) throw UsageError("grid strengths above 0 need train.mmd_mode marginal or conditional");
    }
  }
  if (opts.workers == 0) throw UsageError("--workers must be at least 1");
  const fs::path results_path = ctx.dir / "results.csv";
  const fs::path manifest_path = ctx.dir / "manifest.json";
  if (opts.force) {
    fs::remove(results_path);
    fs::remove(manifest_path);
    fs::remove_all(ctx.dir / "cells");
  }
  fs::create_directories(ctx.dir);

  Existing existing = ReadResults(results_path, ctx.hash);
  std::set<std::string> done = ReadManifest(manifest_path, ctx.hash);
  done.insert(existing.done.begin(), existing.done.end());
  if (!fs::exists(results_path)) WriteFileAtomic(results_path, Join(kColumns) + "\n");

  const std::vector<GridCell> all = Cells(config);
  std::vector<const GridCell*> todo;
  for (const GridCell& g : all) {
    if (!done.count(g.key)) todo.push_back(&g);
  }
  std::printf("grid: %zu cells, %zu done, %zu to run with %zu workers (config %s)\n", all.size(),
              all.size() - todo.size(), todo.size(), opts.workers, ctx.hash.c_str());
  std::fflush(stdout);

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::size_t finished = 0;
  auto worker = [&] {
    while (!failed) {
      const std::size_t i = next++;
      if (i >= todo.size()) return;
      const GridCell& g = *todo[i];
      try {
        const CellResult r = RunGridCell(g, config);
        WriteFileAtomic(ctx.dir / "cells" / g.key / "metrics.json",
                        CellJson(g, ctx.hash, r).dump(2) + "\n");
        std::vector<std::string> row = Row(g, ctx.hash, r, config);
        std::lock_guard<std::mutex> lock(mu);
        {
          std::ofstream out(results_path, std::ios::binary | std::ios::app);
          out << Join(row) + "\n";
          out.flush();
          if (!out) throw Error("cannot append to " + results_path.string());
        }
        existing.rows.push_back(std::move(row));
        done.insert(g.key);
        WriteManifest(manifest_path, ctx.hash, all.size(), done);
        std::printf("grid: %s done (%zu/%zu)\n", g.key.c_str(), ++finished, todo.size());
        std::fflush(stdout);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> threads;
  const std::size_t n = std::min(opts.workers, std::max<std::size_t>(todo.size(), 1));
  for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  WriteManifest(manifest_path, ctx.hash, all.size(), done);

  WriteFileAtomic(ctx.dir / "plot_worst_group.csv", PlotData(existing.rows, "ideal_worst_group"));
  WriteFileAtomic(ctx.dir / "plot_shift_gap.csv", PlotData(existing.rows, "shift_max_gap"));
  std::printf("grid: %zu rows in %s\n", existing.rows.size(), results_path.string().c_str());
  return kExitOk;
}

}  // namespace jbal::cli
