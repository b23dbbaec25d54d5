#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hfsched/model.hpp"
#include "hfsched/operand_net.hpp"
#include "hfsched/simulation.hpp"
#include "hfsched/solver.hpp"

namespace hfsched {

// An instance file: the network plus optional solver options. Round-trips
// losslessly through serialize_native / parse_native.
struct InstanceDocument {
  std::string schema_version = "1";
  ProjectNetwork network;
  std::optional<int> horizon;
  std::optional<std::string> formulation;  // rcpsp | hfnmcf | both

  bool operator==(const InstanceDocument& o) const {
    return schema_version == o.schema_version && network == o.network &&
           horizon == o.horizon && formulation == o.formulation;
  }
};

namespace detail {

// Whitespace tokenizer with double-quoted strings as single tokens.
inline std::vector<std::string> tokenize(const std::string& line, int lineno) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    if (line[i] == '"') {
      std::size_t end = line.find('"', i + 1);
      if (end == std::string::npos)
        throw ParseError("unterminated quoted string", lineno);
      tokens.push_back(line.substr(i + 1, end - i - 1));
      i = end + 1;
    } else {
      std::size_t end = i;
      while (end < line.size() &&
             !std::isspace(static_cast<unsigned char>(line[end])))
        ++end;
      tokens.push_back(line.substr(i, end - i));
      i = end;
    }
  }
  return tokens;
}

inline int parse_int(const std::string& tok, int lineno,
                     const std::string& what) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("expected integer for " + what + ", got '" + tok + "'",
                     lineno);
  }
}

inline Variant parse_variant(const std::string& tok, int lineno) {
  if (tok == "renewable") return Variant::Renewable;
  if (tok == "nonrenewable" || tok == "non-renewable") return Variant::NonRenewable;
  throw ParseError("unknown variant '" + tok + "'", lineno);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Native .proj format
// ---------------------------------------------------------------------------

inline InstanceDocument parse_native(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  InstanceDocument doc;
  ProjectNetwork& net = doc.network;

  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> tok = detail::tokenize(line, lineno);
    if (tok.empty()) continue;
    if (!saw_header) {
      if (tok[0] != "hfsched-project" || tok.size() != 2)
        throw ParseError("expected 'hfsched-project <version>' header", lineno);
      doc.schema_version = tok[1];
      if (doc.schema_version != "1")
        throw ParseError("unsupported schema version '" + tok[1] + "'", lineno);
      saw_header = true;
      continue;
    }
    const std::string& key = tok[0];
    if (key == "project") {
      if (tok.size() != 2) throw ParseError("project takes one name", lineno);
      net.name = tok[1];
    } else if (key == "variant") {
      if (tok.size() != 2) throw ParseError("variant takes one value", lineno);
      net.variant = detail::parse_variant(tok[1], lineno);
    } else if (key == "horizon") {
      if (tok.size() != 2) throw ParseError("horizon takes one value", lineno);
      doc.horizon = detail::parse_int(tok[1], lineno, "horizon");
    } else if (key == "formulation") {
      if (tok.size() != 2) throw ParseError("formulation takes one value", lineno);
      if (tok[1] != "rcpsp" && tok[1] != "hfnmcf" && tok[1] != "both")
        throw ParseError("unknown formulation '" + tok[1] + "'", lineno);
      doc.formulation = tok[1];
    } else if (key == "pool") {
      if (tok.size() < 4 || tok[2] != "capacity")
        throw ParseError("expected 'pool <id> capacity <n> [kind <k>]'", lineno);
      OperandPool pool;
      pool.id = tok[1];
      pool.capacity = detail::parse_int(tok[3], lineno, "capacity");
      pool.kind = net.variant == Variant::Renewable ? OperandKind::Renewable
                                                    : OperandKind::NonRenewable;
      std::size_t i = 4;
      while (i < tok.size()) {
        if (tok[i] == "kind" && i + 1 < tok.size()) {
          pool.kind = detail::parse_variant(tok[i + 1], lineno) == Variant::Renewable
                          ? OperandKind::Renewable
                          : OperandKind::NonRenewable;
          i += 2;
        } else {
          throw ParseError("unknown field '" + tok[i] + "' in pool", lineno);
        }
      }
      net.pools.push_back(std::move(pool));
    } else if (key == "activity") {
      if (tok.size() < 4 || tok[2] != "duration")
        throw ParseError("expected 'activity <id> duration <n> ...'", lineno);
      Activity a;
      a.id = tok[1];
      a.label = a.id;
      a.duration = detail::parse_int(tok[3], lineno, "duration");
      std::size_t i = 4;
      while (i < tok.size()) {
        if (tok[i] == "label" && i + 1 < tok.size()) {
          a.label = tok[i + 1];
          i += 2;
        } else if (tok[i] == "demands" && i + 1 < tok.size()) {
          std::stringstream ss(tok[i + 1]);
          std::string part;
          while (std::getline(ss, part, ',')) {
            std::size_t eq = part.find('=');
            if (eq == std::string::npos)
              throw ParseError("expected <pool>=<units> in demands", lineno);
            int units = detail::parse_int(part.substr(eq + 1), lineno, "demand");
            if (units != 0) a.demands[part.substr(0, eq)] = units;
          }
          i += 2;
        } else {
          throw ParseError("unknown field '" + tok[i] + "' in activity", lineno);
        }
      }
      net.activities.push_back(std::move(a));
    } else if (key == "arc") {
      if (tok.size() != 3) throw ParseError("expected 'arc <pred> <succ>'", lineno);
      net.arcs.push_back({tok[1], tok[2]});
    } else {
      throw ParseError("unknown field '" + key + "'", lineno);
    }
  }
  if (!saw_header) throw ParseError("empty document", 0);

  ValidationReport report = validate_network(net);
  if (!report.valid())
    throw Error("invalid instance:\n" + report.to_string());
  return doc;
}

inline std::string serialize_native(const InstanceDocument& doc) {
  std::ostringstream os;
  const ProjectNetwork& net = doc.network;
  os << "hfsched-project " << doc.schema_version << "\n";
  if (!net.name.empty()) os << "project " << net.name << "\n";
  os << "variant " << to_string(net.variant) << "\n";
  if (doc.horizon) os << "horizon " << *doc.horizon << "\n";
  if (doc.formulation) os << "formulation " << *doc.formulation << "\n";
  for (const OperandPool& p : net.pools)
    os << "pool " << p.id << " capacity " << p.capacity << "\n";
  for (const Activity& a : net.activities) {
    os << "activity " << a.id << " duration " << a.duration;
    if (a.label != a.id) os << " label \"" << a.label << "\"";
    if (!a.demands.empty()) {
      os << " demands ";
      bool first = true;
      for (const auto& [pool, units] : a.demands) {
        if (!first) os << ",";
        os << pool << "=" << units;
        first = false;
      }
    }
    os << "\n";
  }
  for (const Arc& arc : net.arcs) os << "arc " << arc.pred << " " << arc.succ << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// PSPLIB single-mode .sm ingestion (read-only)
// ---------------------------------------------------------------------------

inline ProjectNetwork parse_psplib_sm(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(in, raw)) lines.push_back(raw);

  auto squeeze_upper = [](const std::string& s) {
    std::string out;
    for (char c : s)
      if (!std::isspace(static_cast<unsigned char>(c)))
        out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return out;
  };
  auto int_after_colon = [&](const std::string& s, int lineno) {
    std::size_t colon = s.find(':');
    if (colon == std::string::npos)
      throw ParseError("expected ':' in '" + s + "'", lineno);
    std::istringstream fields(s.substr(colon + 1));
    int v;
    if (!(fields >> v)) throw ParseError("expected count after ':'", lineno);
    return v;
  };

  int job_count = -1, renewable_count = -1, nonrenewable_count = 0;
  int precedence_at = -1, requests_at = -1, avail_at = -1;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string s = squeeze_upper(lines[i]);
    if (s.rfind("JOBS(INCL", 0) == 0)
      job_count = int_after_colon(lines[i], static_cast<int>(i + 1));
    else if (s.rfind("-RENEWABLE", 0) == 0)
      renewable_count = int_after_colon(lines[i], static_cast<int>(i + 1));
    else if (s.rfind("-NONRENEWABLE", 0) == 0)
      nonrenewable_count = int_after_colon(lines[i], static_cast<int>(i + 1));
    else if (s.rfind("PRECEDENCERELATIONS", 0) == 0)
      precedence_at = static_cast<int>(i);
    else if (s.rfind("REQUESTS/DURATIONS", 0) == 0)
      requests_at = static_cast<int>(i);
    else if (s.rfind("RESOURCEAVAILABILIT", 0) == 0)
      avail_at = static_cast<int>(i);
  }
  if (job_count < 0) throw ParseError("missing section: jobs header", 0);
  if (renewable_count < 0) throw ParseError("missing section: RESOURCES", 0);
  if (precedence_at < 0) throw ParseError("missing section: PRECEDENCE RELATIONS", 0);
  if (requests_at < 0) throw ParseError("missing section: REQUESTS/DURATIONS", 0);
  if (avail_at < 0) throw ParseError("missing section: RESOURCEAVAILABILITIES", 0);
  if (nonrenewable_count > 0)
    throw Error("PSPLIB ingest supports renewable resources only (file declares " +
                std::to_string(nonrenewable_count) + " nonrenewable)");
  if (job_count < 2) throw ParseError("job count must include the dummy jobs", 0);

  auto job_id = [&](int j) { return "j" + std::to_string(j); };
  auto is_rule = [](const std::string& s) {
    return s.rfind("***", 0) == 0 || s.rfind("---", 0) == 0;
  };

  ProjectNetwork net;
  net.variant = Variant::Renewable;
  for (int j = 2; j < job_count; ++j) {
    Activity a;
    a.id = job_id(j);
    a.label = a.id;
    net.activities.push_back(std::move(a));
  }

  // Precedence rows: jobnr #modes #successors successors...
  std::vector<std::vector<int>> successors(job_count + 1);
  int row = precedence_at + 2;  // skip the column header line
  int seen_jobs = 0;
  for (; row < static_cast<int>(lines.size()) && seen_jobs < job_count; ++row) {
    if (is_rule(lines[row])) break;
    std::istringstream fields(lines[row]);
    int job, modes, nsucc;
    if (!(fields >> job >> modes >> nsucc)) continue;
    if (modes != 1)
      throw Error("multi-mode unsupported (job " + std::to_string(job) +
                  " declares " + std::to_string(modes) + " modes)");
    for (int s = 0; s < nsucc; ++s) {
      int j;
      if (!(fields >> j))
        throw ParseError("truncated successor list for job " + std::to_string(job),
                         row + 1);
      successors[job].push_back(j);
    }
    ++seen_jobs;
  }
  if (seen_jobs < job_count)
    throw ParseError("missing section: PRECEDENCE RELATIONS rows (" +
                         std::to_string(seen_jobs) + " of " +
                         std::to_string(job_count) + " jobs)",
                     row);
  for (int j = 2; j < job_count; ++j)
    for (int s : successors[j])
      if (s >= 2 && s < job_count) net.arcs.push_back({job_id(j), job_id(s)});

  // Requests rows: jobnr mode duration r1 r2 ...
  row = requests_at + 2;
  while (row < static_cast<int>(lines.size()) && is_rule(lines[row])) ++row;
  seen_jobs = 0;
  for (; row < static_cast<int>(lines.size()) && seen_jobs < job_count; ++row) {
    if (is_rule(lines[row])) break;
    std::istringstream fields(lines[row]);
    int job, mode, duration;
    if (!(fields >> job >> mode >> duration)) continue;
    std::vector<int> demand(renewable_count, 0);
    for (int r = 0; r < renewable_count; ++r)
      if (!(fields >> demand[r]))
        throw ParseError("truncated request row for job " + std::to_string(job),
                         row + 1);
    if (job >= 2 && job < job_count) {
      Activity& a = net.activities[job - 2];
      a.duration = duration;
      for (int r = 0; r < renewable_count; ++r)
        if (demand[r] != 0) a.demands["R" + std::to_string(r + 1)] = demand[r];
    }
    ++seen_jobs;
  }
  if (seen_jobs < job_count)
    throw ParseError("missing section: REQUESTS/DURATIONS rows (" +
                         std::to_string(seen_jobs) + " of " +
                         std::to_string(job_count) + " jobs)",
                     row);

  if (renewable_count > 0) {
    row = avail_at + 1;
    while (row < static_cast<int>(lines.size()) &&
           (is_rule(lines[row]) || squeeze_upper(lines[row]).empty() ||
            squeeze_upper(lines[row]).front() == 'R'))
      ++row;
    if (row >= static_cast<int>(lines.size()))
      throw ParseError("missing section: RESOURCEAVAILABILITIES values", row);
    std::istringstream fields(lines[row]);
    for (int r = 0; r < renewable_count; ++r) {
      int cap;
      if (!(fields >> cap))
        throw ParseError("truncated resource availabilities", row + 1);
      net.pools.push_back(
          {"R" + std::to_string(r + 1), OperandKind::Renewable, cap});
    }
  }

  ValidationReport report = validate_network(net);
  if (!report.valid())
    throw Error("invalid PSPLIB instance:\n" + report.to_string());
  return net;
}

// ---------------------------------------------------------------------------
// Results document (.result)
// ---------------------------------------------------------------------------

struct ResultDocument {
  InstanceDocument instance;
  std::string formulation;
  std::string status;
  long long objective = 0;
  int makespan = 0;
  std::map<std::string, int> starts;
  StateTrajectory trajectory;
};

inline std::string serialize_results(const Schedule& schedule,
                                     const StateTrajectory& traj,
                                     const InstanceDocument& instance,
                                     const std::string& formulation) {
  OperandNet net = build_operand_net(instance.network);
  std::ostringstream os;
  os << "hfsched-result 1\n";
  os << "[instance]\n" << serialize_native(instance);
  os << "[solution]\n";
  os << "formulation " << formulation << "\n";
  os << "status " << to_string(schedule.proof) << "\n";
  os << "objective " << schedule.objective << "\n";
  os << "makespan " << schedule.makespan << "\n";
  for (const auto& [id, k] : schedule.starts) {
    if (id == "finish") continue;
    const Activity* a = instance.network.find_activity(id);
    int finish_event = k + (a ? a->duration : 0);
    os << "start " << id << " " << k << " finish " << finish_event - 1 << "\n";
  }
  if (schedule.starts.count("finish"))
    os << "start finish " << schedule.starts.at("finish") << "\n";

  os << "[usage]\n";
  for (const PoolUsage& u : per_period_usage(traj, net)) {
    os << "pool " << u.pool << " period";
    for (int k = 0; k <= schedule.makespan; ++k) os << " " << u.per_period[k];
    os << "\n";
    os << "pool " << u.pool << " cumulative";
    for (int k = 0; k <= schedule.makespan; ++k) os << " " << u.cumulative[k];
    os << "\n";
  }

  os << "[trajectory]\n";
  os << "horizon " << traj.horizon << "\n";
  auto write_matrix_row = [&](const std::string& prefix, const IntMatrix& m,
                              int r) {
    os << prefix;
    for (int c = 0; c < m.cols; ++c) os << " " << m.at(r, c);
    os << "\n";
  };
  for (int p = 0; p < net.place_count(); ++p) {
    std::string tag = p == net.start_place() ? "qs start"
                      : p <= net.pool_count ? "qs pool " + net.places[p]
                                            : "qs done " + net.places[p];
    write_matrix_row(tag, traj.q_s, p);
  }
  for (int t = 0; t < net.transition_count(); ++t)
    write_matrix_row("qe " + net.transitions[t], traj.q_e, t);
  for (int t = 0; t < net.transition_count(); ++t)
    write_matrix_row("um " + net.transitions[t], traj.u_minus, t);
  for (int t = 0; t < net.transition_count(); ++t)
    write_matrix_row("up " + net.transitions[t], traj.u_plus, t);
  return os.str();
}

inline void write_results(const Schedule& schedule, const StateTrajectory& traj,
                          const InstanceDocument& instance,
                          const std::string& formulation,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << serialize_results(schedule, traj, instance, formulation);
  out.flush();
  if (!out) throw IoError("failed writing results to '" + path + "'");
}

inline ResultDocument parse_results(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line) || line != "hfsched-result 1")
    throw ParseError("expected 'hfsched-result 1' header", 1);
  ++lineno;

  ResultDocument doc;
  std::string section;
  std::ostringstream instance_text;
  std::vector<std::pair<std::string, std::vector<int>>> qs_rows, qe_rows, um_rows,
      up_rows;
  int horizon = -1;

  auto parse_row = [&](std::istringstream& fields) {
    std::vector<int> values;
    int v;
    while (fields >> v) values.push_back(v);
    return values;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line;
      continue;
    }
    if (section == "[instance]") {
      instance_text << line << "\n";
    } else if (section == "[solution]") {
      std::istringstream fields(line);
      std::string key;
      fields >> key;
      if (key == "formulation")
        fields >> doc.formulation;
      else if (key == "status")
        fields >> doc.status;
      else if (key == "objective")
        fields >> doc.objective;
      else if (key == "makespan")
        fields >> doc.makespan;
      else if (key == "start") {
        std::string id;
        int k;
        fields >> id >> k;
        doc.starts[id] = k;
      } else {
        throw ParseError("unknown solution field '" + key + "'", lineno);
      }
    } else if (section == "[usage]") {
      // regenerable from the trajectory; skipped on read
    } else if (section == "[trajectory]") {
      std::istringstream fields(line);
      std::string key;
      fields >> key;
      if (key == "horizon") {
        fields >> horizon;
      } else if (key == "qs") {
        std::string kind, name;
        fields >> kind;
        if (kind == "start")
          name = "start";
        else
          fields >> name;
        qs_rows.push_back({name, parse_row(fields)});
      } else if (key == "qe" || key == "um" || key == "up") {
        std::string name;
        fields >> name;
        auto& rows = key == "qe" ? qe_rows : key == "um" ? um_rows : up_rows;
        rows.push_back({name, parse_row(fields)});
      } else {
        throw ParseError("unknown trajectory field '" + key + "'", lineno);
      }
    } else {
      throw ParseError("content outside any section", lineno);
    }
  }

  doc.instance = parse_native(instance_text.str());
  if (horizon < 0) throw ParseError("missing trajectory horizon", lineno);

  StateTrajectory& traj = doc.trajectory;
  traj.horizon = horizon;
  traj.q_s = IntMatrix(static_cast<int>(qs_rows.size()), horizon + 1);
  traj.q_e = IntMatrix(static_cast<int>(qe_rows.size()), horizon + 1);
  traj.u_minus = IntMatrix(static_cast<int>(um_rows.size()), horizon);
  traj.u_plus = IntMatrix(static_cast<int>(up_rows.size()), horizon);
  auto fill = [&](IntMatrix& m, const auto& rows, int expected_cols,
                  std::vector<std::string>& names) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      names.push_back(rows[r].first);
      if (static_cast<int>(rows[r].second.size()) != expected_cols)
        throw ParseError("trajectory row '" + rows[r].first + "' has " +
                             std::to_string(rows[r].second.size()) +
                             " columns, expected " + std::to_string(expected_cols),
                         0);
      for (int c = 0; c < expected_cols; ++c)
        m.at(static_cast<int>(r), c) = rows[r].second[c];
    }
  };
  fill(traj.q_s, qs_rows, horizon + 1, traj.place_names);
  fill(traj.q_e, qe_rows, horizon + 1, traj.transition_names);
  std::vector<std::string> ignored;
  fill(traj.u_minus, um_rows, horizon, ignored);
  ignored.clear();
  fill(traj.u_plus, up_rows, horizon, ignored);
  return doc;
}

inline ResultDocument read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_results(buffer.str());
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace hfsched
