// Copyright 2026 The GazeGuard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// gazeguard command-line front end.
//
// Exit codes: 0 ok, 2 config/usage, 3 data, 4 auth, 5 not found (including a
// dummy from a rotated-out epoch), 1 internal.

#include <termios.h>
#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gazeguard.h"

namespace {

constexpr const char* kPassphraseEnv = "GAZEGUARD_ADMIN_PASSPHRASE";

int ExitCode(gg_status status) {
  switch (status) {
    case GG_OK: return 0;
    case GG_ERR_CONFIG: return 2;
    case GG_ERR_DATA:
    case GG_ERR_LAYOUT: return 3;
    case GG_ERR_AUTH: return 4;
    case GG_ERR_NOT_FOUND:
    case GG_ERR_STALE_EPOCH: return 5;
    default: return 1;
  }
}

class CliError {
 public:
  explicit CliError(gg_status status) : status_(status), message_(gg_last_error()) {}
  gg_status status() const { return status_; }
  const std::string& message() const { return message_; }

 private:
  gg_status status_;
  std::string message_;
};

void Check(gg_status status) {
  if (status != GG_OK) throw CliError(status);
}

template <typename F>
std::string ReadString(F&& call) {
  size_t needed = 0;
  gg_status st = call(nullptr, 0, &needed);
  if (st != GG_ERR_BUFFER_TOO_SMALL) Check(st);
  std::string buf(needed, '\0');
  Check(call(buf.data(), buf.size(), &needed));
  buf.resize(needed - 1);
  return buf;
}

// Environment first; otherwise prompt on a terminal with echo off.
std::string AdminPassphrase() {
  if (const char* env = std::getenv(kPassphraseEnv)) return env;
  if (!isatty(STDIN_FILENO)) return {};
  std::cerr << "admin passphrase: " << std::flush;
  termios old{};
  tcgetattr(STDIN_FILENO, &old);
  termios silent = old;
  silent.c_lflag &= ~static_cast<tcflag_t>(ECHO);
  tcsetattr(STDIN_FILENO, TCSANOW, &silent);
  std::string line;
  std::getline(std::cin, line);
  tcsetattr(STDIN_FILENO, TCSANOW, &old);
  std::cerr << "\n";
  return line;
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string data;
};

class Experiment {
 public:
  explicit Experiment(const Options& o) {
    Check(gg_experiment_create(o.config.empty() ? nullptr : o.config.c_str(), &exp_));
    if (o.seed) Check(gg_experiment_set_seed(exp_, *o.seed));
    if (!o.out.empty()) Check(gg_experiment_set_output_dir(exp_, o.out.c_str()));
    if (!o.data.empty()) Check(gg_experiment_set_data_path(exp_, o.data.c_str()));
  }
  ~Experiment() { gg_experiment_free(exp_); }
  Experiment(const Experiment&) = delete;
  Experiment& operator=(const Experiment&) = delete;

  gg_experiment* get() { return exp_; }

  std::string VaultPath() const {
    return ReadString(
        [&](char* b, size_t n, size_t* need) { return gg_experiment_vault_path(exp_, b, n, need); });
  }

 private:
  gg_experiment* exp_ = nullptr;
};

class VaultHandle {
 public:
  explicit VaultHandle(const std::string& path) { Check(gg_vault_open(path.c_str(), &vault_)); }
  ~VaultHandle() {
    gg_keys_free(keys_);
    gg_vault_free(vault_);
  }
  VaultHandle(const VaultHandle&) = delete;
  VaultHandle& operator=(const VaultHandle&) = delete;

  void Unlock(const std::string& passphrase) {
    Check(gg_vault_unlock(vault_, passphrase.c_str(), &keys_));
  }
  bool TryUnlock(const std::string& passphrase) {
    return gg_vault_unlock(vault_, passphrase.c_str(), &keys_) == GG_OK;
  }
  gg_vault* get() { return vault_; }
  gg_vault_keys* keys() { return keys_; }

 private:
  gg_vault* vault_ = nullptr;
  gg_vault_keys* keys_ = nullptr;
};

int RunExperimentCommand(const std::string& command, const Options& o) {
  Experiment exp(o);
  const std::string pass = command == "phase2" ? AdminPassphrase() : std::string();
  Check(gg_experiment_run(exp.get(), command.c_str(), pass.c_str()));
  std::cout << ReadString([&](char* b, size_t n, size_t* need) {
    return gg_experiment_summary_json(exp.get(), b, n, need);
  }) << "\n";
  return 0;
}

int VaultInit(const Options& o) {
  Experiment exp(o);
  const std::string path = exp.VaultPath();
  if (std::filesystem::exists(path)) {
    std::cerr << "error: vault already initialized at " << path << "\n";
    return 2;
  }
  const std::string pass = AdminPassphrase();
  if (pass.empty()) {
    std::cerr << "error: set " << kPassphraseEnv << " or enter a passphrase\n";
    return 4;
  }
  int iterations = 0;
  Check(gg_experiment_kdf_iterations(exp.get(), &iterations));
  gg_vault* vault = nullptr;
  Check(gg_vault_create(pass.c_str(), iterations, &vault));
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  const gg_status st = gg_vault_save(vault, path.c_str());
  gg_vault_free(vault);
  Check(st);
  std::cout << "{\"command\": \"vault-init\", \"vault\": \"" << path << "\", \"epoch\": 0}\n";
  return 0;
}

int Rotate(const Options& o) {
  Experiment exp(o);
  const std::string path = exp.VaultPath();
  VaultHandle vault(path);
  vault.Unlock(AdminPassphrase());
  std::uint64_t epoch = 0;
  Check(gg_vault_rotate(vault.get(), &epoch));
  Check(gg_vault_save(vault.get(), path.c_str()));
  std::cout << "{\"command\": \"rotate\", \"epoch\": " << epoch << "}\n";
  return 0;
}

int Resolve(const Options& o, const std::string& dummy, std::optional<std::uint64_t> epoch) {
  Experiment exp(o);
  const std::string path = exp.VaultPath();
  VaultHandle vault(path);
  const std::string pass = AdminPassphrase();
  // A failed unlock still goes through resolve so the refusal is audited.
  vault.TryUnlock(pass);
  std::int64_t id = 0;
  const gg_status st = gg_vault_resolve(vault.get(), vault.keys(), pass.c_str(), dummy.c_str(),
                                        epoch ? 1 : 0, epoch.value_or(0), &id);
  std::optional<CliError> failure;
  if (st != GG_OK) failure.emplace(st);
  Check(gg_vault_save(vault.get(), path.c_str()));
  if (failure) throw *failure;
  std::cout << "{\"command\": \"resolve\", \"dummy\": \"" << dummy << "\", \"true_id\": " << id
            << "}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GazeGuard eye-tracking privacy lab"};
  app.require_subcommand(1);
  Options opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON configuration file");
    sub->add_option("--seed", opts.seed, "Master seed");
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--data", opts.data, "Input CSV (default: synthetic data)");
  };
  const char* experiment_commands[][2] = {
      {"synth", "Generate the synthetic dataset"},
      {"scenario1", "Diagnosis classification, level split"},
      {"scenario2", "Student re-identification, level split"},
      {"scenario3", "Student re-identification, random split"},
      {"scenario4", "Identity assignment for an unseen student"},
      {"phase2", "Federated training on vault-issued dummy labels"},
      {"report", "Gap between scenario 2 and scenario 3"}};
  for (const auto& [name, help] : experiment_commands) add_common(app.add_subcommand(name, help));
  add_common(app.add_subcommand("vault-init", "Create the identity vault"));
  add_common(app.add_subcommand("rotate", "Start a new vault epoch"));
  auto* resolve = app.add_subcommand("resolve", "Map a dummy id back to the true id");
  add_common(resolve);
  std::string dummy;
  std::optional<std::uint64_t> epoch;
  resolve->add_option("dummy", dummy, "Dummy id")->required();
  resolve->add_option("--epoch", epoch, "Epoch to search (default: current)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "vault-init") return VaultInit(opts);
    if (command == "rotate") return Rotate(opts);
    if (command == "resolve") return Resolve(opts, dummy, epoch);
    return RunExperimentCommand(command, opts);
  } catch (const CliError& e) {
    std::cerr << "error (" << gg_status_name(e.status()) << "): " << e.message() << "\n";
    return ExitCode(e.status());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
