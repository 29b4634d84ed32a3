#include "ecsim/cli/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "ecsim/errors.hpp"
#include "ecsim/locc.hpp"
#include "ecsim/protocols.hpp"

namespace ecsim::cli {

namespace {

const char* const kColumns[] = {"protocol",
                                "a",
                                "p_d",
                                "p_g",
                                "g",
                                "success_probability",
                                "output_fidelity",
                                "infidelity",
                                "catalyst_fidelity_before",
                                "catalyst_fidelity_after",
                                "mcx_total"};
constexpr std::size_t kColumnCount = std::size(kColumns);

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string g_text(std::size_t g) { return g == locc::kAllTransforms ? "all" : std::to_string(g); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("invalid number for " + what + ": '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw UsageError("invalid number for " + what + ": '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  if (s == "all") return locc::kAllTransforms;
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError("invalid count for " + what + ": '" + s + "'");
  return static_cast<std::size_t>(std::stoull(s));
}

double physical(double value, Axis axis, AxisConvention c) {
  return (c == AxisConvention::retention && axis != Axis::p_g) ? 1.0 - value : value;
}

double axis_param(const SweepRow& r, Axis axis) {
  switch (axis) {
    case Axis::a: return r.a;
    case Axis::p_d: return r.p_d;
    case Axis::p_g: return r.p_g;
  }
  return 0.0;
}

}  // namespace

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::nec: return "nec";
    case Protocol::cec: return "cec";
    case Protocol::catalyst_reuse: return "catalyst-reuse";
    case Protocol::distillation: return "distillation";
  }
  return "?";
}

std::string to_string(Axis a) {
  switch (a) {
    case Axis::a: return "a";
    case Axis::p_d: return "p_d";
    case Axis::p_g: return "p_g";
  }
  return "?";
}

std::string to_string(AxisConvention c) { return c == AxisConvention::error ? "error" : "retention"; }

Protocol parse_protocol(const std::string& s) {
  for (Protocol p : {Protocol::nec, Protocol::cec, Protocol::catalyst_reuse, Protocol::distillation})
    if (to_string(p) == s) return p;
  throw UsageError("unknown protocol '" + s + "'");
}

Axis parse_axis(const std::string& s) {
  if (s == "a") return Axis::a;
  if (s == "p_d" || s == "pd") return Axis::p_d;
  if (s == "p_g" || s == "pg") return Axis::p_g;
  throw UsageError("unknown axis '" + s + "'");
}

AxisConvention parse_convention(const std::string& s) {
  if (s == "error") return AxisConvention::error;
  if (s == "retention") return AxisConvention::retention;
  throw UsageError("unknown axis convention '" + s + "'");
}

std::vector<Protocol> parse_protocols(const std::string& s) {
  std::vector<Protocol> out;
  for (const auto& item : split(s, ',')) {
    if (item.empty()) continue;
    const Protocol p = parse_protocol(item);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Range Range::parse(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw UsageError("range must be lo:hi:step, got '" + s + "'");
  const Range r{parse_double(parts[0], "range"), parse_double(parts[1], "range"), parse_double(parts[2], "range")};
  if (!(r.step > 0.0)) throw UsageError("range step must be positive");
  if (r.lo > r.hi) throw UsageError("range lower bound exceeds upper bound");
  return r;
}

std::vector<double> Range::values() const {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    // Rounded so printed axis values stay short (0.3, not 0.30000000000000004).
    const double v = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
    out.push_back(v);
  }
  return out;
}

void SweepConfig::validate() const {
  if (protocols.empty()) throw UsageError("at least one protocol must be selected");
  if (!(range.step > 0.0)) throw UsageError("range step must be positive");
  if (range.lo > range.hi) throw UsageError("range lower bound exceeds upper bound");
  if (range.lo < 0.0 || range.hi > 1.0) throw UsageError("range must lie within [0, 1]");
  if (ttransforms_per_round == 0) throw UsageError("g must be at least 1");
  try {
    base.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

noise::NoiseParams SweepConfig::at(double axis_value) const {
  noise::NoiseParams p = base;
  const double v = physical(axis_value, axis, convention);
  switch (axis) {
    case Axis::a: p.a = v; break;
    case Axis::p_d: p.p_d = v; break;
    case Axis::p_g: p.p_g = v; break;
  }
  return p;
}

SweepRow run_point(Protocol protocol, const noise::NoiseParams& params, std::size_t g, bool recompile_on_reuse) {
  const auto rho = noise::prepare_state(params);
  protocols::ProtocolResult r;
  // Inputs already passed validation, so a domain failure here means the
  // protocol cannot run at this point (e.g. a product surrogate).
  try {
    switch (protocol) {
      case Protocol::nec: r = protocols::run_nec(rho, rho, g, params.p_g); break;
      case Protocol::cec:
        r = protocols::run_cec(rho, rho, protocols::best_catalyst(rho, rho), g, params.p_g);
        break;
      case Protocol::catalyst_reuse: {
        const auto first = protocols::run_cec(rho, rho, protocols::best_catalyst(rho, rho), g, params.p_g);
        r = protocols::reuse_catalyst(first, rho, rho, g, params.p_g, recompile_on_reuse);
        break;
      }
      case Protocol::distillation:
        r = protocols::run_distillation(rho, rho, protocols::optimize_distillation(rho, rho, params.p_g), params.p_g);
        break;
    }
  } catch (const DomainError& e) {
    throw NumericalError(to_string(protocol) + " at a=" + num(params.a) + " p_d=" + num(params.p_d) +
                         " p_g=" + num(params.p_g) + ": " + e.what());
  }
  SweepRow row;
  row.protocol = protocol;
  row.a = params.a;
  row.p_d = params.p_d;
  row.p_g = params.p_g;
  row.g = g;
  row.success_probability = r.success_probability;
  row.output_fidelity = r.output_fidelity;
  row.infidelity = r.infidelity();
  row.catalyst_fidelity_before = r.catalyst_fidelity_before;
  row.catalyst_fidelity_after = r.catalyst_fidelity_after;
  row.mcx_total = r.gate_counts.total();
  return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  config.validate();
  const auto values = config.range.values();
  struct Task {
    double value;
    Protocol protocol;
  };
  auto protos = config.protocols;
  std::sort(protos.begin(), protos.end());
  protos.erase(std::unique(protos.begin(), protos.end()), protos.end());
  std::vector<Task> tasks;
  for (double v : values)
    for (Protocol p : protos) tasks.push_back({v, p});

  std::vector<SweepRow> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        rows[i] = run_point(tasks[i].protocol, config.at(tasks[i].value), config.ttransforms_per_round,
                            config.recompile_on_reuse);
        rows[i].axis_value = tasks[i].value;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t n = config.threads != 0 ? config.threads : std::max(1U, std::thread::hardware_concurrency());
  n = std::min(n, tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, Axis axis, AxisConvention convention) {
  out << "# " << kCsvVersion << " axis=" << to_string(axis) << " convention=" << to_string(convention) << '\n';
  for (std::size_t i = 0; i < kColumnCount; ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const auto& r : rows) {
    out << to_string(r.protocol) << ',' << num(r.a) << ',' << num(r.p_d) << ',' << num(r.p_g) << ','
        << g_text(r.g) << ',' << num(r.success_probability) << ',' << num(r.output_fidelity) << ','
        << num(r.infidelity) << ',' << (r.catalyst_fidelity_before ? num(*r.catalyst_fidelity_before) : "")
        << ',' << (r.catalyst_fidelity_after ? num(*r.catalyst_fidelity_after) : "") << ',' << r.mcx_total
        << '\n';
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream words(line.substr(1));
      std::string w;
      while (words >> w) {
        if (w.rfind("axis=", 0) == 0) table.axis = parse_axis(w.substr(5));
        if (w.rfind("convention=", 0) == 0) table.convention = parse_convention(w.substr(11));
      }
      continue;
    }
    const auto fields = split(line, ',');
    if (!header) {
      bool ok = fields.size() == kColumnCount;
      for (std::size_t i = 0; ok && i < kColumnCount; ++i) ok = fields[i] == kColumns[i];
      if (!ok) throw UsageError("line " + std::to_string(line_no) + ": unexpected CSV header");
      header = true;
      continue;
    }
    if (fields.size() != kColumnCount)
      throw UsageError("line " + std::to_string(line_no) + ": expected " + std::to_string(kColumnCount) +
                       " fields");
    SweepRow r;
    try {
      r.protocol = parse_protocol(fields[0]);
      r.a = parse_double(fields[1], "a");
      r.p_d = parse_double(fields[2], "p_d");
      r.p_g = parse_double(fields[3], "p_g");
      r.g = parse_count(fields[4], "g");
      r.success_probability = parse_double(fields[5], "success_probability");
      r.output_fidelity = parse_double(fields[6], "output_fidelity");
      r.infidelity = parse_double(fields[7], "infidelity");
      if (!fields[8].empty()) r.catalyst_fidelity_before = parse_double(fields[8], "catalyst_fidelity_before");
      if (!fields[9].empty()) r.catalyst_fidelity_after = parse_double(fields[9], "catalyst_fidelity_after");
      r.mcx_total = parse_count(fields[10], "mcx_total");
    } catch (const UsageError& e) {
      throw UsageError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (table.axis) r.axis_value = physical(axis_param(r, *table.axis), *table.axis, table.convention);
    table.rows.push_back(r);
  }
  if (!header) throw UsageError("CSV has no header line");
  return table;
}

nlohmann::json to_json(const SweepConfig& config, const std::vector<SweepRow>& rows) {
  nlohmann::json protos = nlohmann::json::array();
  for (Protocol p : config.protocols) protos.push_back(to_string(p));
  const auto& b = config.base;
  nlohmann::json cfg{
      {"protocols", protos},
      {"axis", to_string(config.axis)},
      {"range", {{"lo", config.range.lo}, {"hi", config.range.hi}, {"step", config.range.step}}},
      {"convention", to_string(config.convention)},
      {"g", g_text(config.ttransforms_per_round)},
      {"recompile_on_reuse", config.recompile_on_reuse},
      {"a", b.a},
      {"p_d", b.p_d},
      {"p_g", b.p_g},
      {"depolarizing_weights", {b.depolarizing.x, b.depolarizing.z, b.depolarizing.y}},
      {"coherent_weights", {std::abs(b.coherent.x), std::abs(b.coherent.z), std::abs(b.coherent.y)}},
  };
  nlohmann::json out_rows = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"protocol", to_string(r.protocol)},
                     {"axis_value", r.axis_value},
                     {"a", r.a},
                     {"p_d", r.p_d},
                     {"p_g", r.p_g},
                     {"g", g_text(r.g)},
                     {"success_probability", r.success_probability},
                     {"output_fidelity", r.output_fidelity},
                     {"infidelity", r.infidelity},
                     {"mcx_total", r.mcx_total}};
    j["catalyst_fidelity_before"] = r.catalyst_fidelity_before ? nlohmann::json(*r.catalyst_fidelity_before)
                                                               : nlohmann::json(nullptr);
    j["catalyst_fidelity_after"] = r.catalyst_fidelity_after ? nlohmann::json(*r.catalyst_fidelity_after)
                                                             : nlohmann::json(nullptr);
    out_rows.push_back(std::move(j));
  }
  return {{"format", kCsvVersion}, {"config", cfg}, {"rows", out_rows}};
}

}  // namespace ecsim::cli
