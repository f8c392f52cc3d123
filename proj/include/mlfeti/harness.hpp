// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MLFETI_HARNESS_HPP
#define MLFETI_HARNESS_HPP

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mlfeti/coarse_space.hpp"
#include "mlfeti/fem.hpp"
#include "mlfeti/krylov.hpp"
#include "mlfeti/multilevel.hpp"
#include "mlfeti/preconditioners.hpp"
#include "mlfeti/spectrum.hpp"

namespace mlfeti::harness {

enum class Method { bddc_pcg, bddc_gmres, fetidp_mf, fetidp_bd };
enum class EigRequest { none, topk, dense };
enum class Table { table1, table2 };

inline constexpr Method kAllMethods[] = {Method::fetidp_bd, Method::fetidp_mf, Method::bddc_gmres,
                                         Method::bddc_pcg};

std::string_view method_key(Method method);    // "bddc-pcg"
std::string_view method_label(Method method);  // "BDDC-PCG"
Method parse_method(std::string_view text);
std::string_view constraints_key(dd::ConstraintRecipe recipe);  // "c" or "c+e"
dd::ConstraintRecipe parse_constraints(std::string_view text);

struct ExperimentConfig {
  int levels = 2;
  std::vector<int> ratios{3};
  dd::ConstraintRecipe constraints = dd::ConstraintRecipe::corners;
  Method method = Method::bddc_pcg;
  double tol = 1e-8;
  double load = 1.0;
  EigRequest eigs = EigRequest::none;
  Index eigs_k = 150;
  bool parallel = false;
  /// Interface size up to which lambda_max uses the dense eigensolver.
  Index dense_limit = 1500;
};

/// Checks the config and expands a single ratio to levels - 1 copies.
/// Throws Error{config} with a message naming the offending key.
void normalize(ExperimentConfig& config);

/// Flat `key = value` text; `#` starts a comment. Keys: levels, ratios,
/// constraints, method, tol, load, eigs, eigs_k, parallel, dense_limit.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
/// Applies one key/value pair; used by the parser and by CLI overrides.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

struct ResultRow {
  int levels = 0;
  std::string ratios;       // "3,3"
  std::string constraints;  // "c" or "c+e"
  std::string nsub;         // "81/9"
  Index ndof = 0;
  double lambda_max = 0.0;
  Index iterations = 0;
  std::string method;  // method key
  double seconds = 0.0;
  std::string status = "ok";  // "ok" or the error message
};

/// Everything shared by the methods of one configuration.
struct Experiment {
  ExperimentConfig config;
  dd::DecompositionHierarchy geometry;
  fem::AssembledProblem problem;
  std::shared_ptr<const dd::MultilevelHierarchy> hierarchy;
  std::shared_ptr<CoarseSolver> coarse;
  Vector f_gamma;

  [[nodiscard]] const dd::SubstructuredLevel& fine() const { return hierarchy->fine(); }
  [[nodiscard]] Execution exec() const { return config.parallel ? Execution::parallel : Execution::serial; }
};

Experiment prepare(ExperimentConfig config);

struct SolveOutcome {
  KrylovReport report;
  Vector field;  // all free dofs of the fine grid
  double jump_norm = 0.0;
};

SolveOutcome solve(const Experiment& experiment, Method method);

/// M_S S with the (multilevel) BDDC preconditioner, on Gamma.
LinearOperator bddc_preconditioned_operator(const Experiment& experiment);

/// Largest-magnitude eigenvalue of the BDDC preconditioned operator.
SpectrumReport estimate_lambda_max(const Experiment& experiment);

ResultRow run_experiment(const ExperimentConfig& config);

/// Configurations of a table: ratio 3 with L = 2..5, ratio 4 with L = 2..4,
/// ratio 6 with L = 2..3. Table 1 uses corners, table 2 corners and edges;
/// the remaining settings come from `base`.
std::vector<ExperimentConfig> table_configs(Table which, const ExperimentConfig& base = {});

using Progress = std::function<void(const ResultRow&)>;

/// Runs every configuration with all four methods. Failures are recorded in
/// ResultRow::status and the run continues.
std::vector<ResultRow> run_table(Table which, const ExperimentConfig& base, bool parallel_rows = false,
                                 const Progress& progress = {});

std::string format_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(std::string_view text);
std::string format_markdown(const std::vector<ResultRow>& rows, std::string_view title);

struct EigsResult {
  SpectrumReport bddc;
  SpectrumReport fetidp;
};

/// Top-k spectra of the BDDC preconditioned operator and of the M_F
/// preconditioned saddle operator.
EigsResult compute_eigs(const ExperimentConfig& config, Index k);
std::string format_eigs_csv(const EigsResult& eigs);

}  // namespace mlfeti::harness

#endif  // MLFETI_HARNESS_HPP
