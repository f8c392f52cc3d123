// Copyright 2026 The mlfeti Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlfeti/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mlfeti/error.hpp"
#include "mlfeti/fetidp.hpp"

namespace mlfeti::harness {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::config, "invalid value '" + t + "' for key '" + std::string(key) + "'");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw Error(ErrorKind::config, "invalid boolean '" + t + "' for key '" + std::string(key) + "'");
}

std::string join_ratios(const std::vector<int>& ratios) {
  std::string out;
  for (const int r : ratios) {
    if (!out.empty()) out += ',';
    out += std::to_string(r);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string_view method_key(Method method) {
  switch (method) {
    case Method::bddc_pcg: return "bddc-pcg";
    case Method::bddc_gmres: return "bddc-gmres";
    case Method::fetidp_mf: return "fetidp-mf";
    case Method::fetidp_bd: return "fetidp-bd";
  }
  return "unknown";
}

std::string_view method_label(Method method) {
  switch (method) {
    case Method::bddc_pcg: return "BDDC-PCG";
    case Method::bddc_gmres: return "BDDC-GMRES";
    case Method::fetidp_mf: return "FETI-DP";
    case Method::fetidp_bd: return "BD";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  std::string t = lower(trim(text));
  std::replace(t.begin(), t.end(), '_', '-');
  for (const Method m : kAllMethods) {
    if (t == method_key(m)) return m;
  }
  throw Error(ErrorKind::config,
              "unknown method '" + t + "' (expected bddc-pcg, bddc-gmres, fetidp-mf or fetidp-bd)");
}

std::string_view constraints_key(dd::ConstraintRecipe recipe) {
  return recipe == dd::ConstraintRecipe::corners ? "c" : "c+e";
}

dd::ConstraintRecipe parse_constraints(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "c" || t == "corners") return dd::ConstraintRecipe::corners;
  if (t == "c+e" || t == "corners_edges" || t == "corners-edges") return dd::ConstraintRecipe::corners_edges;
  throw Error(ErrorKind::config, "unknown constraints '" + t + "' (expected c or c+e)");
}

void set_config_value(ExperimentConfig& config, std::string_view key_in, std::string_view value) {
  std::string key = lower(trim(key_in));
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "levels") {
    config.levels = parse_number<int>(key, value);
  } else if (key == "ratios") {
    config.ratios.clear();
    std::string item;
    std::stringstream ss{std::string(value)};
    while (std::getline(ss, item, ',')) config.ratios.push_back(parse_number<int>(key, item));
  } else if (key == "constraints") {
    config.constraints = parse_constraints(value);
  } else if (key == "method") {
    config.method = parse_method(value);
  } else if (key == "tol") {
    config.tol = parse_number<double>(key, value);
  } else if (key == "load") {
    config.load = parse_number<double>(key, value);
  } else if (key == "eigs") {
    const std::string t = lower(trim(value));
    if (t == "none") config.eigs = EigRequest::none;
    else if (t == "topk") config.eigs = EigRequest::topk;
    else if (t == "dense") config.eigs = EigRequest::dense;
    else throw Error(ErrorKind::config, "unknown eigs request '" + t + "' (expected none, topk or dense)");
  } else if (key == "eigs_k") {
    config.eigs_k = parse_number<Index>(key, value);
  } else if (key == "parallel") {
    config.parallel = parse_bool(key, value);
  } else if (key == "dense_limit") {
    config.dense_limit = parse_number<Index>(key, value);
  } else {
    throw Error(ErrorKind::config, "unknown config key '" + key + "'");
  }
}

void normalize(ExperimentConfig& config) {
  if (config.levels < 2) throw Error(ErrorKind::config, "levels must be at least 2");
  if (config.ratios.empty()) throw Error(ErrorKind::config, "ratios must not be empty");
  if (config.ratios.size() == 1 && config.levels > 2) {
    config.ratios.assign(static_cast<std::size_t>(config.levels - 1), config.ratios.front());
  }
  if (static_cast<int>(config.ratios.size()) + 1 != config.levels) {
    throw Error(ErrorKind::config, "levels = " + std::to_string(config.levels) + " needs " +
                                       std::to_string(config.levels - 1) + " ratios, got " +
                                       std::to_string(config.ratios.size()));
  }
  for (const int r : config.ratios) {
    if (r < 2) throw Error(ErrorKind::config, "ratios must be >= 2");
  }
  if (!(config.tol > 0.0 && config.tol < 1.0)) throw Error(ErrorKind::config, "tol must lie in (0, 1)");
  if (config.eigs_k < 1) throw Error(ErrorKind::config, "eigs_k must be positive");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config, "line " + std::to_string(number) + ": expected key = value");
    }
    try {
      set_config_value(config, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
    } catch (const Error& err) {
      throw Error(ErrorKind::config, "line " + std::to_string(number) + ": " + err.detail());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config file '" + path + "'");
  return parse_config(in);
}

Experiment prepare(ExperimentConfig config) {
  normalize(config);
  Experiment ex;
  ex.config = config;
  ex.geometry = dd::build_hierarchy(config.ratios);
  ex.problem = fem::assemble_global(fem::StructuredGrid{ex.geometry.n}, config.load);
  ex.hierarchy = std::make_shared<const dd::MultilevelHierarchy>(
      dd::build_multilevel(ex.problem, ex.geometry, config.constraints, ex.exec()));
  ex.coarse = default_coarse_solver(ex.hierarchy, ex.exec());
  ex.f_gamma = dd::condensed_rhs(ex.fine());
  return ex;
}

SolveOutcome solve(const Experiment& ex, Method method) {
  const auto& level = ex.fine();
  const Execution exec = ex.exec();
  KrylovOptions options;
  options.tol = ex.config.tol;
  SolveOutcome out;
  if (method == Method::bddc_pcg || method == Method::bddc_gmres) {
    const BddcPreconditioner bddc(level, ex.coarse, exec);
    const LinearOperator schur = assembled_schur_operator(level, exec);
    out.report = method == Method::bddc_pcg ? pcg(schur, bddc.as_operator(), ex.f_gamma, options)
                                            : gmres_right(schur, bddc.as_operator(), ex.f_gamma, options);
    out.field = dd::recover_interiors(level, out.report.solution);
    return out;
  }
  const FetiDpSaddleSystem saddle(level, exec);
  const MfPreconditioner prec(level, ex.coarse,
                              method == Method::fetidp_mf ? MfMode::triangular : MfMode::block_diagonal, exec);
  out.report = gmres_right(saddle.as_operator(), prec.as_operator(), saddle.rhs(ex.f_gamma), options);
  const RecoveredSolution rec = recover_solution(level, out.report.solution, ex.f_gamma, exec);
  out.field = rec.field;
  out.jump_norm = rec.jump_norm;
  return out;
}

LinearOperator bddc_preconditioned_operator(const Experiment& ex) {
  auto bddc = std::make_shared<const BddcPreconditioner>(ex.fine(), ex.coarse, ex.exec());
  const LinearOperator schur = assembled_schur_operator(ex.fine(), ex.exec());
  const Index n = schur.rows();
  return {n, n, [bddc, schur, keep = ex.hierarchy](const Vector& x) { return bddc->apply(schur.apply(x)); }};
}

SpectrumReport estimate_lambda_max(const Experiment& ex) {
  const LinearOperator op = bddc_preconditioned_operator(ex);
  if (op.rows() <= ex.config.dense_limit) return dense_spectrum(op, 1, ex.exec());
  return arnoldi_topk(op, 1);
}

ResultRow run_experiment(const ExperimentConfig& config_in) {
  ExperimentConfig config = config_in;
  normalize(config);
  const auto start = std::chrono::steady_clock::now();
  ResultRow row;
  row.levels = config.levels;
  row.ratios = join_ratios(config.ratios);
  row.constraints = std::string(constraints_key(config.constraints));
  row.method = std::string(method_key(config.method));
  const auto geometry = dd::build_hierarchy(config.ratios);
  row.nsub = geometry.nsub_string();
  row.ndof = geometry.reported_ndof();
  const Experiment ex = prepare(config);
  row.lambda_max = std::abs(estimate_lambda_max(ex).eigenvalues.front());
  row.iterations = solve(ex, config.method).report.iterations;
  row.seconds = seconds_since(start);
  return row;
}

std::vector<ExperimentConfig> table_configs(Table which, const ExperimentConfig& base) {
  std::vector<ExperimentConfig> configs;
  for (const auto& [ratio, max_levels] : {std::pair{3, 5}, std::pair{4, 4}, std::pair{6, 3}}) {
    for (int levels = 2; levels <= max_levels; ++levels) {
      ExperimentConfig c = base;
      c.levels = levels;
      c.ratios.assign(static_cast<std::size_t>(levels - 1), ratio);
      c.constraints = which == Table::table1 ? dd::ConstraintRecipe::corners : dd::ConstraintRecipe::corners_edges;
      configs.push_back(c);
    }
  }
  return configs;
}

namespace {

std::vector<ResultRow> run_configuration(const ExperimentConfig& config, const Progress& progress) {
  std::vector<ResultRow> rows;
  ResultRow proto;
  proto.levels = config.levels;
  proto.ratios = join_ratios(config.ratios);
  proto.constraints = std::string(constraints_key(config.constraints));
  std::string setup_error;
  Experiment ex;
  double setup_seconds = 0.0;
  try {
    const auto start = std::chrono::steady_clock::now();
    const auto geometry = dd::build_hierarchy(config.ratios);
    proto.nsub = geometry.nsub_string();
    proto.ndof = geometry.reported_ndof();
    ex = prepare(config);
    proto.lambda_max = std::abs(estimate_lambda_max(ex).eigenvalues.front());
    setup_seconds = seconds_since(start);
  } catch (const std::exception& err) {
    setup_error = err.what();
  }
  for (const Method m : kAllMethods) {
    ResultRow row = proto;
    row.method = std::string(method_key(m));
    if (!setup_error.empty()) {
      row.status = setup_error;
    } else {
      try {
        const auto start = std::chrono::steady_clock::now();
        row.iterations = solve(ex, m).report.iterations;
        row.seconds = setup_seconds + seconds_since(start);
      } catch (const std::exception& err) {
        row.status = err.what();
      }
    }
    if (progress) progress(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_table(Table which, const ExperimentConfig& base, bool parallel_rows,
                                 const Progress& progress) {
  const auto configs = table_configs(which, base);
  std::vector<std::vector<ResultRow>> per_config(configs.size());
  for_each_index(parallel_rows ? Execution::parallel : Execution::serial, configs.size(),
                 [&](std::size_t i) { per_config[i] = run_configuration(configs[i], parallel_rows ? Progress{} : progress); });
  std::vector<ResultRow> rows;
  for (auto& group : per_config) {
    for (auto& row : group) {
      if (parallel_rows && progress) progress(row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

constexpr const char* kCsvHeader = "levels,ratios,constraints,nsub,ndof,lambda_max,iterations,method,seconds,status";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.levels) + "," + csv_field(r.ratios) + "," + csv_field(r.constraints) + "," +
           csv_field(r.nsub) + "," + std::to_string(r.ndof) + "," + format_double(r.lambda_max) + "," +
           std::to_string(r.iterations) + "," + csv_field(r.method) + "," + format_double(r.seconds) + "," +
           csv_field(r.status) + "\n";
  }
  return out;
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    throw Error(ErrorKind::config, "results CSV: missing or unexpected header");
  }
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10) {
      throw Error(ErrorKind::config, "results CSV line " + std::to_string(number) + ": expected 10 fields");
    }
    ResultRow r;
    r.levels = parse_number<int>("levels", f[0]);
    r.ratios = f[1];
    r.constraints = f[2];
    r.nsub = f[3];
    r.ndof = parse_number<Index>("ndof", f[4]);
    r.lambda_max = parse_number<double>("lambda_max", f[5]);
    r.iterations = parse_number<Index>("iterations", f[6]);
    r.method = f[7];
    r.seconds = parse_number<double>("seconds", f[8]);
    r.status = f[9];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_markdown(const std::vector<ResultRow>& rows, std::string_view title) {
  struct Line {
    const ResultRow* base = nullptr;
    std::map<std::string, const ResultRow*> by_method;
  };
  // Keep first-seen order of ratio groups and of configurations.
  std::vector<std::string> groups;
  std::map<std::string, std::vector<std::string>> keys_in_group;
  std::map<std::string, Line> lines;
  for (const auto& r : rows) {
    const std::string group = r.ratios.substr(0, r.ratios.find(',')) + " (" + r.constraints + ")";
    const std::string key = group + "|" + std::to_string(r.levels);
    if (!keys_in_group.count(group)) groups.push_back(group);
    auto& line = lines[key];
    if (!line.base) {
      line.base = &r;
      keys_in_group[group].push_back(key);
    }
    line.by_method[r.method] = &r;
  }
  auto iterations = [&](const Line& line, Method m) -> std::string {
    const auto it = line.by_method.find(std::string(method_key(m)));
    if (it == line.by_method.end()) return "";
    if (it->second->status != "ok") return "fail";
    return std::to_string(it->second->iterations);
  };
  std::string out = "## " + std::string(title) + "\n\n";
  for (const auto& group : groups) {
    out += "### H_l/H_(l-1) = " + group + "\n\n";
    out += "| L | nsub | ndof | lambda_max | BD | FETI-DP | BDDC (GMRES/PCG) |\n";
    out += "|---|---|---|---|---|---|---|\n";
    for (const auto& key : keys_in_group[group]) {
      const auto& line = lines[key];
      char lam[32];
      std::snprintf(lam, sizeof lam, "%.4f", line.base->lambda_max);
      out += "| " + std::to_string(line.base->levels) + " | " + line.base->nsub + " | " +
             std::to_string(line.base->ndof) + " | " + lam + " | " + iterations(line, Method::fetidp_bd) + " | " +
             iterations(line, Method::fetidp_mf) + " | " + iterations(line, Method::bddc_gmres) + "/" +
             iterations(line, Method::bddc_pcg) + " |\n";
    }
    out += "\n";
  }
  std::string failures;
  for (const auto& r : rows) {
    if (r.status != "ok") {
      failures += "- L=" + std::to_string(r.levels) + ", ratios " + r.ratios + ", " + r.method + ": " + r.status + "\n";
    }
  }
  if (!failures.empty()) out += "Failures:\n\n" + failures + "\n";
  return out;
}

EigsResult compute_eigs(const ExperimentConfig& config, Index k) {
  const Experiment ex = prepare(config);
  const auto& level = ex.fine();
  const LinearOperator bddc = bddc_preconditioned_operator(ex);
  const FetiDpSaddleSystem saddle(level, ex.exec());
  const MfPreconditioner mf(level, ex.coarse, MfMode::triangular, ex.exec());
  const LinearOperator fetidp = compose(mf.as_operator(), saddle.as_operator());
  auto spectrum = [&](const LinearOperator& op) {
    const Index kk = std::min(k, op.rows());
    if (ex.config.eigs == EigRequest::topk) return arnoldi_topk(op, kk);
    return dense_spectrum(op, kk, ex.exec());
  };
  return {spectrum(bddc), spectrum(fetidp)};
}

std::string format_eigs_csv(const EigsResult& eigs) {
  std::string out = "index,bddc_real,bddc_imag,fetidp_real,fetidp_imag\n";
  const std::size_t n = std::max(eigs.bddc.eigenvalues.size(), eigs.fetidp.eigenvalues.size());
  for (std::size_t i = 0; i < n; ++i) {
    out += std::to_string(i + 1);
    for (const auto* list : {&eigs.bddc.eigenvalues, &eigs.fetidp.eigenvalues}) {
      if (i < list->size()) {
        out += "," + format_double((*list)[i].real()) + "," + format_double((*list)[i].imag());
      } else {
        out += ",,";
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace mlfeti::harness
