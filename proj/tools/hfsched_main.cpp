// hfsched: validate, transform, solve and report on project instances.
// Thin orchestration over the library; no scheduling logic lives here.
//
// Exit codes: 0 ok, 2 invalid instance, 3 infeasible, 4 formulations diverge,
// 64 usage, 66 missing input, 70 internal error, 74 output I/O failure.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hfsched/hfsched.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitDiverged = 4;
constexpr int kExitUsage = 64;
constexpr int kExitNoInput = 66;
constexpr int kExitInternal = 70;
constexpr int kExitIo = 74;

struct CommonOptions {
  std::string input;
  std::optional<std::string> variant;
  std::vector<std::string> capacity_overrides;  // pool=value
  std::optional<int> horizon;
};

hfsched::InstanceDocument load_instance(const CommonOptions& opt) {
  std::string text = hfsched::read_text_file(opt.input);
  hfsched::InstanceDocument doc;
  if (opt.input.size() >= 3 && opt.input.substr(opt.input.size() - 3) == ".sm") {
    doc.network = hfsched::parse_psplib_sm(text);
  } else {
    doc = hfsched::parse_native(text);
  }
  if (opt.variant) {
    hfsched::Variant v = *opt.variant == "renewable"
                             ? hfsched::Variant::Renewable
                             : hfsched::Variant::NonRenewable;
    doc.network.variant = v;
    for (hfsched::OperandPool& p : doc.network.pools)
      p.kind = v == hfsched::Variant::Renewable
                   ? hfsched::OperandKind::Renewable
                   : hfsched::OperandKind::NonRenewable;
  }
  for (const std::string& override_spec : opt.capacity_overrides) {
    std::size_t eq = override_spec.find('=');
    if (eq == std::string::npos)
      throw hfsched::Error("capacity override must be <pool>=<value>, got '" +
                           override_spec + "'");
    std::string pool = override_spec.substr(0, eq);
    int value = std::stoi(override_spec.substr(eq + 1));
    int idx = doc.network.pool_index(pool);
    if (idx < 0) throw hfsched::Error("no pool named '" + pool + "'");
    doc.network.pools[idx].capacity = value;
  }
  if (opt.horizon) doc.horizon = opt.horizon;
  return doc;
}

void write_or_print(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw hfsched::IoError("cannot open '" + out_path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw hfsched::IoError("failed writing '" + out_path + "'");
}

int default_threads() {
  if (const char* env = std::getenv("HFSCHED_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

int run_validate(const CommonOptions& common) {
  std::string text = hfsched::read_text_file(common.input);
  hfsched::ProjectNetwork net;
  if (common.input.size() >= 3 &&
      common.input.substr(common.input.size() - 3) == ".sm") {
    net = hfsched::parse_psplib_sm(text);  // throws on malformed/invalid input
    std::cout << "ok: " << net.activities.size() << " activities, "
              << net.arcs.size() << " arcs, " << net.pools.size() << " pools\n";
    return kExitOk;
  }
  // Parse without the embedded validation so all violations are reported.
  try {
    hfsched::InstanceDocument doc = hfsched::parse_native(text);
    net = doc.network;
  } catch (const hfsched::ParseError&) {
    throw;
  } catch (const hfsched::Error& e) {
    std::cerr << e.what();
    return kExitInvalid;
  }
  hfsched::ValidationReport report = hfsched::validate_network(net);
  if (!report.valid()) {
    std::cerr << report.to_string();
    return kExitInvalid;
  }
  std::cout << "ok: " << net.activities.size() << " activities, "
            << net.arcs.size() << " arcs, " << net.pools.size() << " pools\n";
  return kExitOk;
}

int run_transform(const CommonOptions& common, const std::string& out_path) {
  hfsched::InstanceDocument doc = load_instance(common);
  hfsched::OperandNet net = hfsched::build_operand_net(doc.network);
  write_or_print(hfsched::describe_operand_net(net), out_path);
  return kExitOk;
}

int run_solve(const CommonOptions& common, const std::string& formulation_flag,
              const std::string& out_path, const std::string& format,
              const hfsched::SolveOptions& solve_opt) {
  hfsched::InstanceDocument doc = load_instance(common);
  std::string formulation = formulation_flag;
  if (formulation.empty()) formulation = doc.formulation.value_or("both");

  hfsched::TimeWindows windows =
      hfsched::critical_path_windows(doc.network, doc.horizon);

  auto solve_one = [&](const std::string& kind) {
    hfsched::IlpProgram prog =
        kind == "rcpsp"
            ? hfsched::build_rcpsp(doc.network, windows)
            : hfsched::build_hfnmcf(hfsched::build_operand_net(doc.network),
                                    windows.horizon);
    return hfsched::solve(prog, solve_opt);
  };

  if (formulation == "both") {
    hfsched::EquivalenceReport eq =
        hfsched::check_equivalence(doc.network, windows.horizon, solve_opt);
    if (!eq.equivalent) {
      std::cerr << eq.details;
      return kExitDiverged;
    }
    if (eq.rcpsp_proof == hfsched::ProofTag::Infeasible) {
      std::cerr << "infeasible within horizon " << windows.horizon
                << " (both formulations agree)\n";
      return kExitInfeasible;
    }
    if (format == "csv")
      std::cout << "rcpsp," << eq.rcpsp_makespan << ",hfnmcf," << eq.hfnmcf_makespan
                << ",equivalent,true\n";
    else
      std::cout << "rcpsp=" << eq.rcpsp_makespan << " hfnmcf=" << eq.hfnmcf_makespan
                << " equivalent=true\n";
    if (!out_path.empty() || format == "doc") {
      hfsched::SolveResult hf = solve_one("hfnmcf");
      if (format == "doc")
        std::cout << hfsched::serialize_results(hf.schedule, *hf.trajectory, doc,
                                                "hfnmcf");
      if (!out_path.empty())
        hfsched::write_results(hf.schedule, *hf.trajectory, doc, "hfnmcf",
                               out_path);
    }
    return kExitOk;
  }

  hfsched::SolveResult res = solve_one(formulation);
  if (res.schedule.proof == hfsched::ProofTag::Infeasible) {
    std::cerr << "infeasible within horizon " << windows.horizon << "\n";
    return kExitInfeasible;
  }
  if (format == "csv")
    std::cout << formulation << "," << res.schedule.makespan << ","
              << res.schedule.objective << ","
              << hfsched::to_string(res.schedule.proof) << "\n";
  else if (format == "doc")
    std::cout << hfsched::serialize_results(res.schedule, *res.trajectory, doc,
                                            formulation);
  else
    std::cout << "makespan=" << res.schedule.makespan
              << " objective=" << res.schedule.objective
              << " status=" << hfsched::to_string(res.schedule.proof)
              << " nodes=" << res.stats.nodes << "\n";
  if (!out_path.empty())
    hfsched::write_results(res.schedule, *res.trajectory, doc, formulation,
                           out_path);
  return kExitOk;
}

int run_export(const CommonOptions& common, const std::string& formulation,
               const std::string& out_path) {
  hfsched::InstanceDocument doc = load_instance(common);
  hfsched::TimeWindows windows =
      hfsched::critical_path_windows(doc.network, doc.horizon);
  hfsched::IlpProgram prog =
      formulation == "rcpsp"
          ? hfsched::build_rcpsp(doc.network, windows)
          : hfsched::build_hfnmcf(hfsched::build_operand_net(doc.network),
                                  windows.horizon);
  write_or_print(hfsched::export_lp_string(prog), out_path);
  return kExitOk;
}

int run_report(const std::string& kind, const std::string& result_path,
               const std::string& format, const std::string& actual_path,
               const std::string& values_spec, std::optional<int> as_of) {
  hfsched::ResultDocument doc = hfsched::read_results(result_path);
  const hfsched::ProjectNetwork& net = doc.instance.network;

  if (kind == "table") {
    for (const hfsched::ScheduleTable& table :
         hfsched::schedule_table(doc.trajectory, net))
      std::cout << (format == "csv" ? table.to_csv() : table.to_text()) << "\n";
    return kExitOk;
  }

  if (kind == "slack") {
    hfsched::Schedule schedule;
    schedule.starts = doc.starts;
    schedule.makespan = doc.makespan;
    hfsched::SlackReport report = hfsched::slack_times(schedule, net, doc.trajectory);
    for (const hfsched::ArcSlack& arc : report.arcs)
      std::cout << "arc " << arc.pred << " -> " << arc.succ << " slack "
                << arc.slack << "\n";
    for (const auto& [id, held] : report.completion_token_periods)
      if (held > 0)
        std::cout << "place done " << id << " holds tokens for " << held
                  << " periods\n";
    return kExitOk;
  }

  if (kind == "eva") {
    if (actual_path.empty())
      throw hfsched::Error("report eva requires --actual <result file>");
    hfsched::ResultDocument actual = hfsched::read_results(actual_path);
    std::map<std::string, long long> values;
    if (values_spec == "unit") {
      for (const hfsched::Activity& a : net.activities) values[a.id] = 1;
    } else {
      std::istringstream in(hfsched::read_text_file(values_spec));
      std::string id;
      long long v;
      while (in >> id >> v) values[id] = v;
    }
    int k = as_of.value_or(doc.trajectory.horizon);
    hfsched::EarnedValueReport eva =
        hfsched::earned_value(doc.trajectory, actual.trajectory, values, k);
    std::cout << "as_of " << eva.as_of << " ev " << eva.earned << " pv "
              << eva.planned << " sv " << eva.schedule_variance << " spi ";
    if (eva.spi)
      std::cout << eva.spi->num << "/" << eva.spi->den << "\n";
    else
      std::cout << "undefined\n";
    return kExitOk;
  }

  throw hfsched::Error("unknown report kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hfsched: project scheduling through operand nets"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string out_path, format = "plain", formulation;
  hfsched::SolveOptions solve_opt;
  solve_opt.threads = default_threads();

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("input", common.input, "instance file (.proj or .sm)")
        ->required();
    cmd->add_option("--variant", common.variant,
                    "override the operand variant (renewable|nonrenewable)")
        ->check(CLI::IsMember({"renewable", "nonrenewable"}));
    cmd->add_option("--capacity", common.capacity_overrides,
                    "override a pool capacity, <pool>=<value>");
    cmd->add_option("--horizon", common.horizon, "time horizon K");
  };

  CLI::App* validate = app.add_subcommand("validate", "check an instance");
  validate->add_option("input", common.input, "instance file")->required();

  CLI::App* transform =
      app.add_subcommand("transform", "emit the operand-net description");
  add_common(transform);
  transform->add_option("-o,--output", out_path, "output path (default stdout)");

  CLI::App* solve = app.add_subcommand("solve", "solve an instance to optimality");
  add_common(solve);
  solve->add_option("--formulation", formulation, "rcpsp|hfnmcf|both")
      ->check(CLI::IsMember({"rcpsp", "hfnmcf", "both"}));
  solve->add_option("-o,--output", out_path, "write a .result document");
  solve->add_option("--format", format, "stdout format: plain|csv|doc")
      ->check(CLI::IsMember({"plain", "csv", "doc"}));
  solve->add_option("--threads", solve_opt.threads, "solver worker threads");
  solve->add_option("--node-limit", solve_opt.node_limit, "search node limit");
  solve->add_option("--timeout-ms", solve_opt.timeout_ms, "search timeout");

  CLI::App* export_cmd =
      app.add_subcommand("export-lp", "export a formulation in LP format");
  add_common(export_cmd);
  export_cmd
      ->add_option("--formulation", formulation, "rcpsp|hfnmcf (default rcpsp)")
      ->check(CLI::IsMember({"rcpsp", "hfnmcf"}));
  export_cmd->add_option("-o,--output", out_path, "output path (default stdout)");

  CLI::App* report = app.add_subcommand("report", "render reports from a .result");
  std::string report_kind, result_path, actual_path, values_spec = "unit";
  std::optional<int> as_of;
  report->add_option("kind", report_kind, "table|slack|eva")
      ->required()
      ->check(CLI::IsMember({"table", "slack", "eva"}));
  report->add_option("result", result_path, ".result file")->required();
  report->add_option("--format", format, "text|csv")
      ->check(CLI::IsMember({"plain", "text", "csv"}));
  report->add_option("--actual", actual_path, "executed-run .result for eva");
  report->add_option("--values", values_spec, "'unit' or a value file for eva");
  report->add_option("--as-of", as_of, "evaluation step for eva");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(validate)) return run_validate(common);
    if (app.got_subcommand(transform)) return run_transform(common, out_path);
    if (app.got_subcommand(solve))
      return run_solve(common, formulation, out_path, format, solve_opt);
    if (app.got_subcommand(export_cmd))
      return run_export(common, formulation.empty() ? "rcpsp" : formulation,
                        out_path);
    if (app.got_subcommand(report))
      return run_report(report_kind, result_path, format, actual_path,
                        values_spec, as_of);
    return kExitUsage;
  } catch (const hfsched::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::string msg = e.what();
    return msg.find("for reading") != std::string::npos ? kExitNoInput : kExitIo;
  } catch (const hfsched::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const hfsched::HorizonError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const hfsched::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
