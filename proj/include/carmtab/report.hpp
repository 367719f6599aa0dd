#pragma once

#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "carmtab/korselt.hpp"

namespace carmtab {

struct RunReport {
  std::string mode;
  std::vector<std::pair<std::string, std::string>> config;  // echoed settings, in order
  double wall_seconds = 0;
  u64 total = 0;
  std::map<std::size_t, u64> per_d;
  std::vector<std::pair<unsigned, u64>> cumulative;  // (k, #{n < 10^k})
  u64 hard_inputs = 0;
  std::vector<std::pair<std::string, u64>> counters;
};

/// Fills total, per-d and cumulative counts from sorted records. Magnitudes
/// run from 10^3 to the smallest power of ten covering `bound` (or the
/// largest record when unbounded).
inline void tally(RunReport& report, const std::vector<CarmichaelRecord>& records,
                  const std::optional<BigNatural>& bound = std::nullopt) {
  report.total = records.size();
  report.per_d.clear();
  for (const auto& r : records) ++report.per_d[r.d()];
  report.cumulative.clear();
  BigNatural top = bound ? *bound : (records.empty() ? BigNatural(1) : records.back().n + 1);
  BigNatural power = 1000;
  std::size_t i = 0;
  for (unsigned k = 3;; ++k, power *= 10) {
    while (i < records.size() && records[i].n < power) ++i;
    report.cumulative.emplace_back(k, i);
    if (power >= top) break;
  }
}

inline void write_text(std::ostream& out, const RunReport& r) {
  auto row = [&](const std::string& k, const std::string& v) { out << std::left << std::setw(22) << k << v << '\n'; };
  row("mode", r.mode);
  for (const auto& [k, v] : r.config) row(k, v);
  std::ostringstream secs;
  secs << std::fixed << std::setprecision(3) << r.wall_seconds;
  row("wall_seconds", secs.str());
  row("total", std::to_string(r.total));
  row("hard_inputs", std::to_string(r.hard_inputs));
  out << "\ncount by d\n";
  for (const auto& [d, c] : r.per_d) out << "  d=" << std::left << std::setw(6) << d << std::right << std::setw(14) << c << '\n';
  out << "\ncumulative count below 10^k\n";
  for (const auto& [k, c] : r.cumulative)
    out << "  10^" << std::left << std::setw(6) << k << std::right << std::setw(14) << c << '\n';
  if (!r.counters.empty()) {
    out << "\ncounters\n";
    for (const auto& [k, v] : r.counters) out << "  " << std::left << std::setw(28) << k << std::right << std::setw(16) << v << '\n';
  }
}

inline void write_kv(std::ostream& out, const RunReport& r) {
  out << "mode=" << r.mode << '\n';
  for (const auto& [k, v] : r.config) out << k << '=' << v << '\n';
  out << "wall_seconds=" << std::fixed << std::setprecision(3) << r.wall_seconds << '\n';
  out << "total=" << r.total << '\n';
  out << "hard_inputs=" << r.hard_inputs << '\n';
  for (const auto& [d, c] : r.per_d) out << "count.d" << d << '=' << c << '\n';
  for (const auto& [k, c] : r.cumulative) out << "below.1e" << k << '=' << c << '\n';
  for (const auto& [k, v] : r.counters) out << "counter." << k << '=' << v << '\n';
}

}  // namespace carmtab
