// Tabulates Carmichael numbers below a bound (default 10^9) and prints the
// counts by number of prime factors, plus the largest one found.

#include <iostream>

#include "carmtab/carmtab.hpp"

int main(int argc, char** argv) {
  carmtab::TabulationConfig cfg;
  cfg.bound = carmtab::parse_natural(argc > 1 ? argv[1] : "1e9");
  cfg.mode = carmtab::Mode::Full;
  const auto out = carmtab::run(cfg);

  std::cout << out.records.size() << " Carmichael numbers below " << cfg.bound->get_str() << " in "
            << out.report.wall_seconds << " s\n";
  for (const auto& [d, count] : out.report.per_d) std::cout << "  d=" << d << ": " << count << '\n';
  if (!out.records.empty()) std::cout << "largest: " << carmtab::format_record(out.records.back()) << '\n';
}
