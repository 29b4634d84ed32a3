#include "ecsim/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace ecsim::cli {

namespace {

double param(const SweepRow& r, Axis axis) {
  switch (axis) {
    case Axis::a: return r.a;
    case Axis::p_d: return r.p_d;
    case Axis::p_g: return r.p_g;
  }
  return 0.0;
}

Axis infer_axis(const std::vector<SweepRow>& rows) {
  for (Axis axis : {Axis::a, Axis::p_d, Axis::p_g}) {
    std::set<double> seen;
    for (const auto& r : rows) seen.insert(param(r, axis));
    if (seen.size() > 1) return axis;
  }
  return Axis::p_d;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

Report summarize(const CsvTable& table) {
  Report rep;
  std::vector<SweepRow> rows = table.rows;
  if (table.axis) {
    rep.axis = *table.axis;
  } else {
    rep.axis = infer_axis(rows);
    for (auto& r : rows) r.axis_value = param(r, rep.axis);
  }

  std::map<Protocol, ProtocolSummary> by;
  for (const auto& r : rows) {
    auto [it, fresh] = by.try_emplace(r.protocol);
    auto& s = it->second;
    if (fresh) {
      s = {r.protocol, 0, r.infidelity, r.axis_value, r.infidelity, r.axis_value, r.success_probability,
           r.success_probability};
    }
    ++s.points;
    if (r.infidelity < s.min_infidelity) {
      s.min_infidelity = r.infidelity;
      s.min_infidelity_at = r.axis_value;
    }
    if (r.infidelity > s.max_infidelity) {
      s.max_infidelity = r.infidelity;
      s.max_infidelity_at = r.axis_value;
    }
    s.min_success = std::min(s.min_success, r.success_probability);
    s.max_success = std::max(s.max_success, r.success_probability);
  }
  for (const auto& [p, s] : by) rep.protocols.push_back(s);

  // Leader (lowest infidelity) per axis value; values within kTie count as
  // ties and keep the earlier protocol.
  constexpr double kTie = 1e-9;
  std::map<double, std::pair<Protocol, double>> leader;
  for (const auto& r : rows) {
    auto it = leader.find(r.axis_value);
    if (it == leader.end()) {
      leader.emplace(r.axis_value, std::pair{r.protocol, r.infidelity});
    } else if (r.infidelity < it->second.second - kTie ||
               (std::abs(r.infidelity - it->second.second) <= kTie && r.protocol < it->second.first)) {
      it->second = {r.protocol, r.infidelity};
    }
  }
  const std::pair<Protocol, double>* prev = nullptr;
  for (const auto& [value, lead] : leader) {
    if (prev != nullptr && prev->first != lead.first) rep.crossovers.push_back({value, prev->first, lead.first});
    prev = &lead;
  }
  return rep;
}

std::string render(const Report& report, const CsvTable& table) {
  std::ostringstream out;
  out << "rows: " << table.rows.size() << "  axis: " << to_string(report.axis)
      << "  convention: " << to_string(table.convention) << '\n';
  if (table.rows.size() == 1) {
    const auto& r = table.rows.front();
    out << "row: " << to_string(r.protocol) << " a=" << num(r.a) << " p_d=" << num(r.p_d) << " p_g=" << num(r.p_g)
        << " success=" << fixed(r.success_probability) << " fidelity=" << fixed(r.output_fidelity)
        << " infidelity=" << fixed(r.infidelity) << " mcx=" << r.mcx_total << '\n';
  }
  out << '\n';
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %6s %12s %10s %12s %10s %10s %10s\n", "protocol", "points", "min_infid",
                "at", "max_infid", "at", "min_succ", "max_succ");
  out << line;
  for (const auto& s : report.protocols) {
    std::snprintf(line, sizeof line, "%-16s %6zu %12s %10s %12s %10s %10s %10s\n", to_string(s.protocol).c_str(),
                  s.points, fixed(s.min_infidelity).c_str(), num(s.min_infidelity_at).c_str(),
                  fixed(s.max_infidelity).c_str(), num(s.max_infidelity_at).c_str(), fixed(s.min_success).c_str(),
                  fixed(s.max_success).c_str());
    out << line;
  }
  out << '\n';
  if (report.crossovers.empty()) {
    out << "crossovers: none\n";
  } else {
    out << "crossovers (lowest infidelity):\n";
    for (const auto& c : report.crossovers)
      out << "  " << to_string(report.axis) << " = " << num(c.axis_value) << ": " << to_string(c.before) << " -> "
          << to_string(c.after) << '\n';
  }
  return out.str();
}

}  // namespace ecsim::cli
