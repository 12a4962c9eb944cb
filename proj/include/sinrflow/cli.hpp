#pragma once

// Command implementations behind the sinrflow tool. Each returns the process
// exit code: 0 ok, 1 usage / I/O / parse error, 2 infeasible instance,
// 3 verification failure, 4 instance too large for the oracle.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <glob.h>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sinrflow/coloring.hpp"
#include "sinrflow/flow.hpp"
#include "sinrflow/generate.hpp"
#include "sinrflow/io.hpp"
#include "sinrflow/lp.hpp"
#include "sinrflow/model.hpp"
#include "sinrflow/oracle.hpp"
#include "sinrflow/pipeline.hpp"
#include "sinrflow/relaxation.hpp"
#include "sinrflow/verify.hpp"

namespace sinrflow {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitInfeasible = 2,
  kExitVerifyFailed = 3,
  kExitTooLarge = 4,
};

// Routes an instance file to the matching pipeline entry point.
inline SolveResult solve_file(const InstanceFile& file, Objective objective, const PipelineOptions& options = {}) {
  const Instance inst = to_instance(file);
  if (file.power_mode == PowerMode::limited)
    return solve_limited_powers(inst, *file.power_range, objective, options);
  const Instance boosted = enforce_snr_assumption(inst);
  if (partition_buckets(boosted).sigma() == 1) return solve_single_bucket(boosted, objective, options);
  return solve_arbitrary_powers(boosted, objective, options);
}

struct VerifyCheck {
  std::string name;
  bool passed;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;

  bool passed() const {
    for (const VerifyCheck& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

inline VerifyReport verify_result(const InstanceFile& file, const ResultFile& result) {
  VerifyReport rep;
  const Instance inst = scheduled_instance(file, result);
  const Schedule schedule = to_schedule(inst, result);
  const MultiCommodityFlow f = to_flow(inst, result);

  {
    std::ostringstream bad;
    std::size_t failures = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < schedule.period(); ++t) {
      const FeasibilityReport r = is_sinr_feasible(inst, schedule.slots[t]);
      worst = std::max(worst, r.worst_affectance);
      if (!r.feasible) {
        if (failures++ < 5) bad << " slot " << t << " (link " << *r.worst_link << ")";
      }
    }
    std::ostringstream detail;
    if (failures > 0)
      detail << failures << " infeasible slot(s):" << bad.str();
    else
      detail << "max a_L(e) = " << worst;
    rep.checks.push_back({"sinr_feasible", failures == 0, detail.str()});
  }
  {
    const SupportReport r = supports(inst, schedule, f);
    std::ostringstream detail;
    if (r.supported) {
      detail << "min slack " << r.min_slack;
    } else {
      for (const SupportEntry& e : r.entries)
        if (e.slack < -kTolerance) {
          detail << "link " << e.link_id << ": T*f(e) = " << e.demand << " > count " << e.count;
          break;
        }
    }
    rep.checks.push_back({"support", r.supported, detail.str()});
  }
  {
    const DemandCheck mode = result.objective == Objective::max_throughput ? DemandCheck::capped()
                                                                            : DemandCheck::at_least(result.throughput);
    const FlowReport r = check_flow(inst, f, mode);
    rep.checks.push_back({"flow", r.valid(), r.valid() ? "valid" : r.violations.front().describe()});
  }
  {
    const SymmetricResidual r = check_symmetric_constraints(inst, partition_buckets(inst), f);
    std::ostringstream detail;
    detail << "max lhs " << r.max_lhs;
    if (r.worst_link) detail << " (link " << *r.worst_link << ")";
    rep.checks.push_back({"symmetric_rows", r.satisfied(), detail.str()});
  }
  {
    const double value =
        result.objective == Objective::max_throughput ? flow_value(inst, f) : min_ratio(inst, f);
    const bool ok = std::abs(value - result.throughput) <= kTolerance * std::max(1.0, std::abs(value));
    std::ostringstream detail;
    detail << "recomputed " << value << ", reported " << result.throughput;
    rep.checks.push_back({"throughput", ok, detail.str()});
  }
  return rep;
}

inline void print_verify_report(const VerifyReport& rep, std::ostream& out) {
  for (const VerifyCheck& c : rep.checks)
    out << std::left << std::setw(16) << c.name << (c.passed ? "PASS" : "FAIL") << "  " << c.detail << "\n";
  out << (rep.passed() ? "PASS" : "FAIL") << "\n";
}

struct ReportRow {
  std::string file;
  std::string objective;
  std::size_t n, m, k, sigma;
  double lp_optimum;
  double achieved;
  std::optional<double> ratio;  // achieved / lp_optimum
  std::size_t period;
  std::optional<double> runtime_seconds;
};

inline const char* kReportHeader =
    "file,objective,n,m,k,sigma,lp_optimum,achieved,ratio_to_lp,period,runtime_seconds";

inline ReportRow report_row(const std::string& file, const ResultFile& r) {
  const ResultDiagnostics& d = r.diagnostics;
  std::optional<double> ratio;
  if (d.lp_optimum > 0.0) ratio = r.throughput / d.lp_optimum;
  return ReportRow{file, to_string(r.objective), d.n,          d.m,      d.k,
                   d.sigma, d.lp_optimum,        r.throughput, ratio,    r.period,
                   d.runtime_seconds};
}

inline std::string format_number(std::optional<double> v) {
  if (!v) return "";
  std::ostringstream os;
  os << std::setprecision(10) << *v;
  return os.str();
}

inline std::vector<std::string> row_fields(const ReportRow& r) {
  return {r.file,
          r.objective,
          std::to_string(r.n),
          std::to_string(r.m),
          std::to_string(r.k),
          std::to_string(r.sigma),
          format_number(r.lp_optimum),
          format_number(r.achieved),
          format_number(r.ratio),
          std::to_string(r.period),
          format_number(r.runtime_seconds)};
}

inline std::string render_report(const std::vector<ReportRow>& rows, bool csv) {
  std::vector<std::vector<std::string>> table;
  {
    std::vector<std::string> header;
    std::stringstream ss(kReportHeader);
    for (std::string cell; std::getline(ss, cell, ',');) header.push_back(cell);
    table.push_back(std::move(header));
  }
  for (const ReportRow& r : rows) table.push_back(row_fields(r));

  std::ostringstream os;
  if (csv) {
    for (const auto& row : table) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
      os << "\n";
    }
    return os.str();
  }
  std::vector<std::size_t> width(table.front().size(), 0);
  for (const auto& row : table)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      if (c + 1 < row.size()) os << "  ";
    }
    os << "\n";
  }
  return os.str();
}

inline std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  if (rc == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  ::globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw IoError("cannot expand " + pattern);
  return out;  // sorted by glob
}

struct SolveCommand {
  std::string in;
  std::string out;
  std::string objective = "maxth";
  std::string dump_lp;
  bool timing = false;
};

struct OracleCommand {
  std::string in;
  std::string objective = "maxth";
  std::string compare;
};

struct ReportCommand {
  std::string results;
  std::string format = "csv";
  std::string out;
};

inline int cmd_generate(const GenerateOptions& opt, const std::string& out_path, std::ostream&, std::ostream& err) {
  try {
    write_file_atomic(out_path, serialize(generate_instance(opt)));
    return kExitOk;
  } catch (const Error& e) {
    err << "generate: " << e.what() << "\n";
    return kExitError;
  }
}

inline int cmd_solve(const SolveCommand& cmd, std::ostream& out, std::ostream& err) {
  const auto objective = parse_objective(cmd.objective);
  if (!objective) {
    err << "solve: --objective must be maxth or maxmin\n";
    return kExitError;
  }
  try {
    const InstanceFile file = parse_instance(read_file(cmd.in));
    const auto start = std::chrono::steady_clock::now();
    const SolveResult result = solve_file(file, *objective);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

    ResultFile rf = to_result_file(result);
    if (cmd.timing) rf.diagnostics.runtime_seconds = elapsed.count();
    write_file_atomic(cmd.out, serialize(rf));
    if (!cmd.dump_lp.empty()) {
      const FlowLp flp = build_flow_lp(result.instance, partition_buckets(result.instance),
                                       AffectanceTable::from_instance(result.instance), *objective);
      write_file_atomic(cmd.dump_lp, to_text(flp.lp));
    }
    out << to_string(*objective) << " " << std::setprecision(10) << result.throughput << " period "
        << result.schedule.period() << "\n";
    return kExitOk;
  } catch (const Infeasible& e) {
    err << "solve: infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const EmptyAfterFiltering& e) {
    err << "solve: infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "solve: " << e.what() << "\n";
    return kExitError;
  }
}

inline int cmd_verify(const std::string& instance_path, const std::string& result_path, std::ostream& out,
                      std::ostream& err) {
  VerifyReport rep;
  try {
    const InstanceFile file = parse_instance(read_file(instance_path));
    const ResultFile result = parse_result(read_file(result_path));
    rep = verify_result(file, result);
  } catch (const Error& e) {
    err << "verify: " << e.what() << "\n";
    return kExitError;
  }
  print_verify_report(rep, out);
  return rep.passed() ? kExitOk : kExitVerifyFailed;
}

inline int cmd_oracle(const OracleCommand& cmd, std::ostream& out, std::ostream& err) {
  const auto objective = parse_objective(cmd.objective);
  if (!objective) {
    err << "oracle: --objective must be maxth or maxmin\n";
    return kExitError;
  }
  try {
    const InstanceFile file = parse_instance(read_file(cmd.in));
    std::optional<ResultFile> result;
    std::optional<Instance> inst;
    if (!cmd.compare.empty()) {
      result = parse_result(read_file(cmd.compare));
      if (result->objective != *objective) {
        err << "oracle: result objective differs from --objective\n";
        return kExitError;
      }
      inst.emplace(scheduled_instance(file, *result));
    } else if (file.power_mode == PowerMode::limited) {
      ExpandedInstance expanded = expand_power_levels(to_instance(file), *file.power_range);
      if (!expanded.instance) throw EmptyAfterFiltering("every candidate link is below the SNR floor at Pmin");
      inst.emplace(std::move(*expanded.instance));
    } else {
      inst.emplace(enforce_snr_assumption(to_instance(file)));
    }

    const OracleResult r = oracle_optimum(*inst, *objective);
    out << std::setprecision(10) << "optimum " << r.optimum << "\n"
        << "feasible_sets " << r.feasible_set_count << "\n";
    if (result) {
      out << "achieved " << result->throughput << "\n";
      if (r.optimum > 0.0) out << "ratio " << result->throughput / r.optimum << "\n";
    }
    return kExitOk;
  } catch (const TooLarge& e) {
    err << "oracle: " << e.what() << "\n";
    return kExitTooLarge;
  } catch (const EmptyAfterFiltering& e) {
    err << "oracle: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "oracle: " << e.what() << "\n";
    return kExitError;
  }
}

inline int cmd_report(const ReportCommand& cmd, std::ostream& out, std::ostream& err) {
  if (cmd.format != "csv" && cmd.format != "table") {
    err << "report: --format must be csv or table\n";
    return kExitError;
  }
  try {
    std::vector<ReportRow> rows;
    for (const std::string& path : expand_glob(cmd.results))
      rows.push_back(report_row(path, parse_result(read_file(path))));
    const std::string text = render_report(rows, cmd.format == "csv");
    if (cmd.out.empty())
      out << text;
    else
      write_file_atomic(cmd.out, text);
    return kExitOk;
  } catch (const Error& e) {
    err << "report: " << e.what() << "\n";
    return kExitError;
  }
}

// Parses argv and dispatches to one subcommand.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-hop routing and SINR scheduling"};
  app.require_subcommand(1);

  GenerateOptions gen;
  std::string gen_out, gen_mode = "given";
  std::optional<double> power_min, power_max;
  auto* generate = app.add_subcommand("generate", "Write a seeded random instance");
  generate->add_option("--nodes", gen.nodes, "Number of nodes (>= 2)")->required();
  generate->add_option("--links", gen.links, "Number of links")->required();
  generate->add_option("--requests", gen.requests, "Number of requests (>= 1)")->required();
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--mode", gen_mode, "given, linear, uniform or limited")
      ->check(CLI::IsMember({"given", "linear", "uniform", "limited"}));
  generate->add_option("--area", gen.area, "Side of the square placement area");
  generate->add_option("--alpha", gen.alpha, "Path-loss exponent");
  generate->add_option("--beta", gen.beta, "SINR threshold");
  generate->add_option("--noise", gen.noise, "Ambient noise");
  generate->add_option("--epsilon", gen.epsilon, "SNR slack");
  generate->add_option("--power-constant", gen.power_constant, "c for linear (c d^alpha) or uniform (c) powers");
  generate->add_option("--power-min", power_min, "Minimum power (limited mode)");
  generate->add_option("--power-max", power_max, "Maximum power (limited mode)");
  generate->add_option("--out", gen_out, "Output instance path")->required();

  SolveCommand solve;
  auto* solve_cmd = app.add_subcommand("solve", "Compute a flow and a SINR-feasible schedule");
  solve_cmd->add_option("--in", solve.in, "Instance path")->required();
  solve_cmd->add_option("--out", solve.out, "Result path")->required();
  solve_cmd->add_option("--objective", solve.objective, "maxth or maxmin");
  solve_cmd->add_option("--dump-lp", solve.dump_lp, "Also write the LP relaxation as text");
  solve_cmd->add_flag("--timing", solve.timing, "Record the runtime in the result");

  std::string verify_instance, verify_result_path;
  auto* verify = app.add_subcommand("verify", "Check a result against its instance");
  verify->add_option("--instance", verify_instance, "Instance path")->required();
  verify->add_option("--result", verify_result_path, "Result path")->required();

  OracleCommand oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact optimum by subset enumeration (m <= 16)");
  oracle_cmd->add_option("--in", oracle.in, "Instance path")->required();
  oracle_cmd->add_option("--objective", oracle.objective, "maxth or maxmin");
  oracle_cmd->add_option("--compare", oracle.compare, "Result to compare against");

  ReportCommand report;
  auto* report_cmd = app.add_subcommand("report", "Summarize result files");
  report_cmd->add_option("--results", report.results, "Glob of result files")->required();
  report_cmd->add_option("--format", report.format, "csv or table");
  report_cmd->add_option("--out", report.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n";
    return kExitError;
  }

  if (generate->parsed()) {
    gen.mode = *parse_power_mode(gen_mode);
    if (power_min) gen.power_min = *power_min;
    if (power_max) gen.power_max = *power_max;
    return cmd_generate(gen, gen_out, out, err);
  }
  if (solve_cmd->parsed()) return cmd_solve(solve, out, err);
  if (verify->parsed()) return cmd_verify(verify_instance, verify_result_path, out, err);
  if (oracle_cmd->parsed()) return cmd_oracle(oracle, out, err);
  if (report_cmd->parsed()) return cmd_report(report, out, err);
  return kExitError;
}

}  // namespace sinrflow
