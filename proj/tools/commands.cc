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


#include "commands.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "jbal/errors.h"
#include "jbal/experiment.h"
#include "jbal/metrics.h"

namespace jbal::cli {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

void WriteFileAtomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string ReadTextFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunContext ResolveRun(const Options& opts) {
  if (!opts.config_path) throw UsageError("--config is required");
  RunContext ctx;
  ctx.config = LoadConfig(*opts.config_path);
  ctx.hash = ConfigHash(ctx.config);
  ctx.dir = opts.out ? fs::path(*opts.out) : fs::path(ctx.config.output_dir);
  ctx.cell = ctx.config.Cell(opts.seed.value_or(ctx.config.replicates.front()));
  return ctx;
}

namespace {

bool Wants(const ExperimentConfig& c, TestSetKind k) {
  for (TestSetKind e : c.eval_sets) {
    if (e == k) return true;
  }
  return false;
}

std::string Prefix(const RunContext& ctx, const std::string& name) {
  return (ctx.dir / name).string();
}

void RefuseOverwrite(const std::vector<std::string>& prefixes, bool force) {
  if (force) return;
  for (const std::string& p : prefixes) {
    for (const char* ext : {".csv", ".meta.json"}) {
      if (fs::exists(p + ext)) {
        throw UsageError(p + ext + " exists; pass --force to overwrite");
      }
    }
  }
}

std::string ShiftName(std::size_t i) { return "test_shift" + std::to_string(i); }

Json ShiftJson(const RiskReport& r) {
  Json j;
  j["risks"] = r.risks;
  j["max_gap"] = r.max_gap;
  j["argmax"] = {r.first, r.second};
  return j;
}

}  // namespace

int CmdGen(const Options& opts) {
  const RunContext ctx = ResolveRun(opts);
  const CellSpec& cell = ctx.cell;
  const bool shift = Wants(ctx.config, TestSetKind::kShift);
  std::vector<std::string> names = {"train"};
  if (Wants(ctx.config, TestSetKind::kSource)) names.push_back("test_source");
  if (Wants(ctx.config, TestSetKind::kIdeal)) names.push_back("test_ideal");
  if (shift) {
    for (std::size_t i = 0; i < cell.eval.shift_points; ++i) names.push_back(ShiftName(i));
  }
  std::vector<std::string> prefixes;
  for (const std::string& n : names) prefixes.push_back(Prefix(ctx, n));
  RefuseOverwrite(prefixes, opts.force);
  fs::create_directories(ctx.dir);

  const GenSpec gen = CellGenSpec(cell);
  WriteDataset(Prefix(ctx, "train"), gen, CellTrainingData(cell), ctx.hash);
  const CellTestsets tests = CellTestData(cell);
  if (Wants(ctx.config, TestSetKind::kSource)) {
    WriteDataset(Prefix(ctx, "test_source"), gen, tests.source, ctx.hash);
  }
  if (Wants(ctx.config, TestSetKind::kIdeal)) {
    WriteDataset(Prefix(ctx, "test_ideal"), gen, tests.ideal, ctx.hash);
  }
  for (std::size_t i = 0; i < tests.shift.size(); ++i) {
    WriteDataset(Prefix(ctx, ShiftName(i)), gen, tests.shift[i], ctx.hash);
  }
  std::printf("gen: wrote %zu datasets to %s (config %s, seed %llu)\n", names.size(),
              ctx.dir.string().c_str(), ctx.hash.c_str(),
              static_cast<unsigned long long>(cell.seed));
  return kExitOk;
}

int CmdBalance(const Options& opts) {
  const RunContext ctx = ResolveRun(opts);
  if (!ctx.config.balance) throw UsageError("[balance] mechanism is none; nothing to balance");
  const std::string out = Prefix(ctx, "train_balanced");
  RefuseOverwrite({out}, opts.force);
  GenSpec gen;
  const Dataset train = ReadDataset(Prefix(ctx, "train"), &gen);
  const Dataset balanced = CellBalance(train, ctx.cell);
  WriteDataset(out, gen, balanced, ctx.hash);
  std::printf("balance: %s, %zu -> %zu rows\n", MechanismName(*ctx.config.balance), train.size(),
              balanced.size());
  return kExitOk;
}

int CmdTrain(const Options& opts) {
  const RunContext ctx = ResolveRun(opts);
  const fs::path model_path = ctx.dir / "model.txt";
  if (!opts.force && fs::exists(model_path)) {
    throw UsageError(model_path.string() + " exists; pass --force to overwrite");
  }
  const std::string input = ctx.config.balance ? "train_balanced" : "train";
  const Dataset train = ReadDataset(Prefix(ctx, input));
  const TrainResult r = CellTrain(train, ctx.cell);
  WriteFileAtomic(model_path, SerializeModel(r.params));
  WriteFileAtomic(ctx.dir / "train_log.csv", SerializeTrainLog(r.log));
  Json info;
  info["config_hash"] = ctx.hash;
  info["seed"] = ctx.cell.seed;
  info["input"] = input;
  info["rows"] = train.size();
  info["bandwidth"] = r.bandwidth;
  info["final_loss"] = r.log.back().loss;
  WriteFileAtomic(ctx.dir / "train.json", info.dump(2) + "\n");
  std::printf("train: %zu rows from %s, final loss %.6g\n", train.size(), input.c_str(),
              r.log.back().loss);
  return kExitOk;
}

int CmdEval(const Options& opts) {
  const RunContext ctx = ResolveRun(opts);
  const ModelParams model = ParseModel(ReadTextFile(ctx.dir / "model.txt"));
  CellTestsets tests;
  if (Wants(ctx.config, TestSetKind::kSource)) tests.source = ReadDataset(Prefix(ctx, "test_source"));
  if (Wants(ctx.config, TestSetKind::kIdeal)) tests.ideal = ReadDataset(Prefix(ctx, "test_ideal"));
  if (Wants(ctx.config, TestSetKind::kShift)) {
    for (std::size_t i = 0; i < ctx.cell.eval.shift_points; ++i) {
      tests.shift.push_back(ReadDataset(Prefix(ctx, ShiftName(i))));
    }
  }
  CellResult result;
  EvaluateCell(model, tests, ctx.cell, &result);
  Json doc;
  doc["config_hash"] = ctx.hash;
  doc["seed"] = ctx.cell.seed;
  if (tests.source.size() > 0) doc["source"] = Json::parse(SerializeMetrics(result.source));
  if (tests.ideal.size() > 0) doc["ideal"] = Json::parse(SerializeMetrics(result.ideal));
  if (result.shift) doc["shift"] = ShiftJson(*result.shift);
  WriteFileAtomic(ctx.dir / "eval.json", doc.dump(2) + "\n");
  std::printf("eval:");
  if (tests.source.size() > 0) std::printf(" source acc %.4f", result.source.accuracy);
  if (tests.ideal.size() > 0) {
    std::printf(" ideal acc %.4f worst-group %.4f", result.ideal.accuracy,
                result.ideal.worst_group);
  }
  if (result.shift) std::printf(" shift max gap %.4f", result.shift->max_gap);
  std::printf("\n");
  return kExitOk;
}

}  // namespace jbal::cli
