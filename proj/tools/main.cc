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
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "commands.h"
#include "jbal/errors.h"

namespace {

void AddCommon(CLI::App* cmd, jbal::cli::Options* opts) {
  cmd->add_option("--config", opts->config_path, "experiment config file");
  cmd->add_option("--seed", opts->seed, "replicate seed (default: first configured replicate)");
  cmd->add_option("--workers", opts->workers, "parallel grid cells")->check(CLI::PositiveNumber);
  cmd->add_flag("--force", opts->force, "overwrite existing outputs");
  cmd->add_option("--out", opts->out, "output directory (overrides run.output_dir)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace jbal::cli;
  CLI::App app{"jbal: joint (Y, Z) balancing experiments"};
  app.require_subcommand(1);
  Options opts;
  VerifyOptions vopts;
  std::string verify_id;

  CLI::App* gen = app.add_subcommand("gen", "generate training and test datasets");
  CLI::App* balance = app.add_subcommand("balance", "jointly balance the training data");
  CLI::App* train = app.add_subcommand("train", "train a model on the (balanced) training data");
  CLI::App* eval = app.add_subcommand("eval", "evaluate the trained model on the test sets");
  CLI::App* verify = app.add_subcommand("verify", "check a proposition; exit 3 if not confirmed");
  CLI::App* grid = app.add_subcommand("grid", "run the balance x strength x seed grid");
  for (CLI::App* cmd : {gen, balance, train, eval, verify, grid}) AddCommon(cmd, &opts);
  verify->add_option("id", verify_id, "proposition id")->required();
  verify->add_option("--grid", vopts.grid, "points per axis of grid scans");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return CmdGen(opts);
    if (*balance) return CmdBalance(opts);
    if (*train) return CmdTrain(opts);
    if (*eval) return CmdEval(opts);
    if (*verify) return CmdVerify(verify_id, opts, vopts);
    if (*grid) return CmdGrid(opts);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
