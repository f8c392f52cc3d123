// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

// Command line driver: single runs, the two result tables and eigenvalue
// dumps.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "mlfeti/error.hpp"
#include "mlfeti/harness.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mlfeti;

struct Overrides {
  std::string config_path;
  std::optional<std::string> levels;
  std::optional<std::string> ratios;
  std::optional<std::string> constraints;
  std::optional<std::string> method;
  std::optional<std::string> tol;
  std::optional<std::string> eigs_k;
  std::optional<std::string> eigs;
  bool parallel = false;
  bool parallel_rows = false;
  bool no_timing = false;
  std::string out;
};

void add_problem_options(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "key = value configuration file");
  app->add_option("--levels", o.levels, "number of levels L");
  app->add_option("--ratios", o.ratios, "coarsening ratios, comma separated (one value is repeated)");
  app->add_option("--constraints", o.constraints, "c or c+e")->check(CLI::IsMember({"c", "c+e"}));
}

void add_common_options(CLI::App* app, Overrides& o) {
  app->add_option("--tol", o.tol, "relative residual tolerance");
  app->add_option("--out", o.out, "output directory");
  app->add_flag("--parallel", o.parallel, "run per-subdomain kernels with OpenMP");
  app->add_flag("--no-timing", o.no_timing, "write zero wall times so repeated runs give identical files");
}

std::vector<harness::ResultRow> for_output(std::vector<harness::ResultRow> rows, const Overrides& o) {
  if (o.no_timing) {
    for (auto& r : rows) r.seconds = 0.0;
  }
  return rows;
}

harness::ExperimentConfig build_config(const Overrides& o) {
  harness::ExperimentConfig config =
      o.config_path.empty() ? harness::ExperimentConfig{} : harness::load_config(o.config_path);
  const std::pair<const char*, const std::optional<std::string>*> fields[] = {
      {"levels", &o.levels}, {"ratios", &o.ratios}, {"constraints", &o.constraints}, {"method", &o.method},
      {"tol", &o.tol},       {"eigs_k", &o.eigs_k}, {"eigs", &o.eigs}};
  for (const auto& [key, value] : fields) {
    if (*value) harness::set_config_value(config, key, **value);
  }
  if (o.parallel) config.parallel = true;
  harness::normalize(config);
  return config;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::config, "cannot write '" + path.string() + "'");
  out << text;
}

void print_row(const harness::ResultRow& r) {
  std::printf("L=%d ratios=%s %s nsub=%s ndof=%lld lambda_max=%.4f %s iterations=%lld (%.2fs) %s\n", r.levels,
              r.ratios.c_str(), r.constraints.c_str(), r.nsub.c_str(), static_cast<long long>(r.ndof), r.lambda_max,
              r.method.c_str(), static_cast<long long>(r.iterations), r.seconds, r.status.c_str());
  std::fflush(stdout);
}

int run_single(const Overrides& o) {
  const auto config = build_config(o);
  const auto row = harness::run_experiment(config);
  print_row(row);
  if (!o.out.empty()) {
    const auto rows = for_output({row}, o);
    write_file(fs::path(o.out) / "run.csv", harness::format_csv(rows));
    write_file(fs::path(o.out) / "run.md", harness::format_markdown(rows, "Single run"));
  }
  return 0;
}

int run_table(harness::Table which, const Overrides& o) {
  const auto base = build_config(o);
  const auto rows = harness::run_table(which, base, o.parallel_rows, print_row);
  const std::string name = which == harness::Table::table1 ? "table1" : "table2";
  const std::string title = which == harness::Table::table1 ? "Corner constraints" : "Corner and edge constraints";
  const std::string markdown = harness::format_markdown(rows, title);
  std::cout << "\n" << markdown;
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  write_file(dir / (name + ".csv"), harness::format_csv(for_output(rows, o)));
  write_file(dir / (name + ".md"), markdown);
  bool all_ok = true;
  for (const auto& r : rows) all_ok = all_ok && r.status == "ok";
  return all_ok ? 0 : 2;
}

int run_eigs(const Overrides& o) {
  const auto config = build_config(o);
  const auto eigs = harness::compute_eigs(config, config.eigs_k);
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  const fs::path path = dir / "eigs.csv";
  write_file(path, harness::format_eigs_csv(eigs));
  std::printf("wrote %zu/%zu eigenvalues (%s/%s) to %s\n", eigs.bddc.eigenvalues.size(),
              eigs.fetidp.eigenvalues.size(), std::string(to_string(eigs.bddc.method)).c_str(),
              std::string(to_string(eigs.fetidp.method)).c_str(), path.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel BDDC and FETI-DP experiments on the unit square Poisson problem"};
  app.require_subcommand(1);
  Overrides o;

  auto* run = app.add_subcommand("run", "solve one configuration");
  add_problem_options(run, o);
  add_common_options(run, o);
  run->add_option("--method", o.method, "solver")
      ->check(CLI::IsMember({"bddc-pcg", "bddc-gmres", "fetidp-mf", "fetidp-bd"}));

  auto* t1 = app.add_subcommand("table1", "all configurations with corner constraints");
  auto* t2 = app.add_subcommand("table2", "all configurations with corner and edge constraints");
  for (auto* t : {t1, t2}) {
    add_common_options(t, o);
    t->add_flag("--parallel-rows", o.parallel_rows, "run table rows concurrently");
  }

  auto* eigs = app.add_subcommand("eigs", "largest eigenvalues of the BDDC and FETI-DP operators");
  add_problem_options(eigs, o);
  add_common_options(eigs, o);
  eigs->add_option("--eigs-k", o.eigs_k, "number of eigenvalues");
  eigs->add_option("--eigs-method", o.eigs, "dense or topk (Arnoldi)")->check(CLI::IsMember({"dense", "topk"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return run_single(o);
    if (t1->parsed()) return run_table(harness::Table::table1, o);
    if (t2->parsed()) return run_table(harness::Table::table2, o);
    if (eigs->parsed()) return run_eigs(o);
  } catch (const Error& err) {
    std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(err.kind())).c_str(), err.detail().c_str());
    return 1;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 1;
}
