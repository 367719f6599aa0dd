#pragma once

// Orchestration: small and large regimes, sharded workers, merging, file
// verification and the large-case method benchmark.

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "carmtab/largecase.hpp"
#include "carmtab/oracle.hpp"
#include "carmtab/preproducts.hpp"
#include "carmtab/records.hpp"
#include "carmtab/report.hpp"
#include "carmtab/smallcase.hpp"

namespace carmtab {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOutput {
  std::vector<CarmichaelRecord> records;      // sorted, unique
  std::vector<CarmichaelRecord> above_bound;  // small-case finds with n >= B, kept when unbounded
  std::vector<std::string> hard_inputs;       // "Pq lambda(Pq) reason"
  SmallCaseStats small;
  LargeCaseStats large;
  u64 small_preproducts = 0;
  RunReport report;
};

inline void validate(const TabulationConfig& cfg) {
  if (cfg.jobs == 0) throw UsageError("--jobs must be positive");
  if (cfg.shard.total == 0 || cfg.shard.index >= cfg.shard.total) throw UsageError("shard index out of range");
  if (cfg.mode != Mode::Small && !cfg.bound) throw UsageError("--bound is required in this mode");
  if (cfg.bound && sgn(*cfg.bound) <= 0) throw UsageError("bound must be positive");
  if (cfg.mode == Mode::Oracle && *cfg.bound > oracle::kMaxLimit) throw UsageError("oracle bound above 10^9 refused");
  if (cfg.mode == Mode::Small && !cfg.bound && !cfg.max_p && !cfg.crossover)
    throw UsageError("small mode needs --max-p, --crossover or --bound");
  if (cfg.bound && (cfg.mode == Mode::Large || cfg.mode == Mode::Full)) {
    const u64 X = crossover_of(cfg);
    if (X < 3 || BigNatural(static_cast<unsigned long>(X)) >= *cfg.bound) throw UsageError("crossover must satisfy 3 <= X < B");
    if (*cfg.bound > BigNatural("18446744073709551616")) throw UsageError("large case supports B <= 2^64");
  }
  if (cfg.min_p && cfg.max_p && *cfg.min_p >= *cfg.max_p) throw UsageError("--min-p must be below --max-p");
  if (cfg.max_p && *cfg.max_p > kMaxSmallPreproduct + 1) throw UsageError("--max-p above 2^31");
  if (cfg.d && *cfg.d < 3) throw UsageError("--d must be at least 3");
}

namespace detail {

inline constexpr u64 kSharedSieveSpan = u64{1} << 22;

struct WorkerResult {
  std::vector<CarmichaelRecord> records;
  std::vector<std::string> hard_inputs;
  SmallCaseStats small;
  LargeCaseStats large;
  u64 small_preproducts = 0;
};

// Completes every cyclic P in [lo, hi) whose enumeration index falls in `shard`.
inline void run_small(u64 lo, u64 hi, Shard shard, const Bound& bound, WorkerResult& out) {
  lo = std::max<u64>(lo, 3);
  u64 counter = 0;
  const SmallCaseOptions opts;
  for (u64 a = lo; a < hi;) {
    u64 b = hi;
    if (2 * hi - (a - 1) > kSharedSieveSpan) b = std::min(hi, std::max(a + 1, (kSharedSieveSpan + a - 1) / 2));
    std::optional<FactorSieve> shared;
    if (2 * b - (a - 1) <= kSharedSieveSpan) shared.emplace(a - 1, 2 * b);
    small_preproducts(a, b, [&](const Preproduct& pre) {
      if (counter++ % shard.total != shard.index) return;
      ++out.small_preproducts;
      auto recs = hybrid_completions(pre, bound, shared ? &*shared : nullptr, opts, &out.small);
      for (auto& r : recs) out.records.push_back(std::move(r));
    });
    a = b;
  }
}

inline void run_large(const Bound& B, u64 X, std::optional<unsigned> d, Shard shard, LargeMethod method,
                      WorkerResult& out) {
  large_preproducts(B, X, d, shard, [&](const PreproductPQ& pp, unsigned) {
    try {
      auto recs = complete_preproduct(pp, B, &out.large, method);
      for (auto& r : recs) out.records.push_back(std::move(r));
    } catch (const HardInputError& e) {
      out.hard_inputs.push_back(e.report_line());
    }
  });
}

// Runs `work(sub_shard, result)` on `jobs` threads; sub-shard j of shard i/n
// is (i + n j)/(n jobs), so the union over j is exactly shard i/n.
template <class Work>
std::vector<WorkerResult> run_workers(Shard shard, unsigned jobs, Work&& work) {
  std::vector<WorkerResult> results(jobs);
  if (jobs == 1) {
    work(shard, results[0]);
    return results;
  }
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> threads;
  for (unsigned j = 0; j < jobs; ++j) {
    threads.emplace_back([&, j] {
      try {
        work(Shard{shard.index + shard.total * j, shard.total * jobs}, results[j]);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

inline void absorb(RunOutput& out, std::vector<WorkerResult>& results) {
  for (auto& w : results) {
    for (auto& r : w.records) out.records.push_back(std::move(r));
    for (auto& h : w.hard_inputs) out.hard_inputs.push_back(std::move(h));
    out.small += w.small;
    out.large += w.large;
    out.small_preproducts += w.small_preproducts;
  }
}

inline std::string opt_str(const std::optional<u64>& v) { return v ? std::to_string(*v) : "-"; }

inline void fill_counters(RunOutput& out) {
  auto& c = out.report.counters;
  c = {{"small.preproducts", out.small_preproducts},
       {"small.d_values", out.small.d_values},
       {"small.cd_loops", out.small.cd_loops},
       {"small.ddelta_loops", out.small.ddelta_loops},
       {"small.cd_pairs", out.small.cd_pairs},
       {"small.ddelta_pairs", out.small.ddelta_pairs},
       {"small.integral", out.small.integral},
       {"small.primality_calls", out.small.verify.primality_calls},
       {"large.preproducts", out.large.preproducts},
       {"large.easy", out.large.easy},
       {"large.residue", out.large.residue},
       {"large.worst", out.large.worst},
       {"large.trial", out.large.trial},
       {"large.candidates", out.large.candidates},
       {"large.primality_calls", out.large.verify.primality_calls}};
}

}  // namespace detail

/// Runs one tabulation in memory. Small-case preproducts are P in
/// [min_p, max_p) (default [3, X)); the large case takes P >= X.
inline RunOutput run(const TabulationConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  RunOutput out;
  const Bound B = cfg.bound ? Bound(*cfg.bound) : Bound::unbounded();

  if (cfg.mode == Mode::Oracle) {
    if (cfg.shard.index == 0) out.records = oracle::brute_force_tabulate(cfg.bound->get_ui()).records;
  }
  if (cfg.mode == Mode::Small || cfg.mode == Mode::Full) {
    const u64 lo = cfg.mode == Mode::Small ? cfg.min_p.value_or(3) : 3;
    const u64 hi = cfg.mode == Mode::Small && cfg.max_p ? *cfg.max_p : crossover_of(cfg);
    if (hi > kMaxSmallPreproduct + 1) throw UsageError("small-case preproducts above 2^31");
    const Bound small_bound = cfg.bounded_small ? B : Bound::unbounded();
    auto results = detail::run_workers(cfg.shard, cfg.jobs, [&](Shard s, detail::WorkerResult& w) {
      detail::run_small(lo, hi, s, small_bound, w);
    });
    detail::absorb(out, results);
    if (cfg.bound && !cfg.bounded_small) {
      std::vector<CarmichaelRecord> below;
      for (auto& r : out.records) (B.admits(r.n) ? below : out.above_bound).push_back(std::move(r));
      out.records = std::move(below);
      normalize(out.above_bound);
    }
  }
  if (cfg.mode == Mode::Large || cfg.mode == Mode::Full) {
    const u64 X = crossover_of(cfg);
    auto results = detail::run_workers(cfg.shard, cfg.jobs, [&](Shard s, detail::WorkerResult& w) {
      detail::run_large(B, X, cfg.d, s, LargeMethod::Residue, w);
    });
    detail::absorb(out, results);
  }
  normalize(out.records);

  auto& rep = out.report;
  rep.mode = to_string(cfg.mode);
  rep.config = {{"bound", cfg.bound ? cfg.bound->get_str() : "none"},
                {"crossover", cfg.mode == Mode::Oracle || (!cfg.bound && !cfg.crossover) ? "-" : std::to_string(crossover_of(cfg))},
                {"shard", std::to_string(cfg.shard.index) + "/" + std::to_string(cfg.shard.total)},
                {"d", cfg.d ? std::to_string(*cfg.d) : "all"},
                {"min_p", detail::opt_str(cfg.min_p)},
                {"max_p", detail::opt_str(cfg.max_p)},
                {"unbounded_small", cfg.bounded_small ? "false" : "true"},
                {"jobs", std::to_string(cfg.jobs)}};
  tally(rep, out.records, cfg.bound);
  rep.hard_inputs = out.hard_inputs.size();
  detail::fill_counters(out);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

inline void write_report(const std::filesystem::path& dir, const RunReport& report) {
  std::ofstream txt(dir / "report.txt"), kv(dir / "report.kv");
  if (!txt || !kv) throw IoError("cannot write report in " + dir.string());
  write_text(txt, report);
  write_kv(kv, report);
  if (!txt || !kv) throw IoError("report write failed in " + dir.string());
}

/// Writes carmichael.txt, report.txt, report.kv, and where applicable
/// records_above_bound.txt and the hard-input report.
inline void write_outputs(const TabulationConfig& cfg, const RunOutput& out) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create " + cfg.output_dir.string() + ": " + ec.message());
  write_records(cfg.output_dir / "carmichael.txt", out.records);
  if (cfg.bound && !cfg.bounded_small && cfg.mode != Mode::Large)
    write_records(cfg.output_dir / "records_above_bound.txt", out.above_bound);
  if (cfg.hard_report || !out.hard_inputs.empty()) {
    const auto path = cfg.hard_report.value_or(cfg.output_dir / "hard_inputs.txt");
    std::ofstream h(path);
    if (!h) throw IoError("cannot write " + path.string());
    for (const auto& line : out.hard_inputs) h << line << '\n';
  }
  write_report(cfg.output_dir, out.report);
}

/// Unites record files: de-duplicated, sorted, counted by d and magnitude.
inline RunOutput merge_count(const std::vector<std::filesystem::path>& files,
                             const std::optional<BigNatural>& bound = std::nullopt) {
  const auto start = std::chrono::steady_clock::now();
  RunOutput out;
  for (const auto& f : files) {
    auto recs = read_records(f);
    for (auto& r : recs) out.records.push_back(std::move(r));
  }
  normalize(out.records);
  out.report.mode = "merge";
  out.report.config = {{"files", std::to_string(files.size())}, {"bound", bound ? bound->get_str() : "none"}};
  tally(out.report, out.records, bound);
  out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

struct VerifyOutcome {
  bool ok = true;
  std::size_t checked = 0;
  std::size_t failed_line = 0;  // 1-based; 0 when ok
  std::string message;
};

/// Re-checks every line: product, ordering, Korselt divisibility and primality.
inline VerifyOutcome verify_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  VerifyOutcome v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      const auto rec = parse_record(line, path.string(), line_no);
      if (!korselt_check(rec)) {
        v.ok = false;
        v.failed_line = line_no;
        v.message = path.string() + ":" + std::to_string(line_no) + ": not a Carmichael number: " + line;
        return v;
      }
    } catch (const ParseError& e) {
      v.ok = false;
      v.failed_line = line_no;
      v.message = e.what();
      return v;
    }
    ++v.checked;
  }
  return v;
}

struct BenchRow {
  BigNatural bound;
  unsigned d = 0;
  u64 preproducts = 0;
  u64 records = 0;
  double residue_seconds = 0;
  double trial_seconds = 0;
};

/// Large case for one d, once with divisors in residue classes and once with
/// balanced trial division; differing outputs raise VerificationError.
inline std::vector<BenchRow> bench_methods(const std::vector<BigNatural>& bounds, unsigned d,
                                           std::optional<u64> crossover = std::nullopt) {
  std::vector<BenchRow> rows;
  for (const auto& b : bounds) {
    BenchRow row;
    row.bound = b;
    row.d = d;
    const Bound B(b);
    const u64 X = crossover.value_or(default_crossover(b));
    std::vector<PreproductPQ> pps;
    if (max_factor_count(B) >= d) large_preproducts(B, X, d, Shard{}, [&](const PreproductPQ& pp, unsigned) { pps.push_back(pp); });
    row.preproducts = pps.size();
    auto time_method = [&](LargeMethod m, double& secs) {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<CarmichaelRecord> recs;
      for (const auto& pp : pps) {
        auto r = complete_preproduct(pp, B, nullptr, m);
        for (auto& x : r) recs.push_back(std::move(x));
      }
      secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      normalize(recs);
      return recs;
    };
    const auto m1 = time_method(LargeMethod::Residue, row.residue_seconds);
    const auto m2 = time_method(LargeMethod::TrialDivision, row.trial_seconds);
    if (m1 != m2) throw VerificationError("method outputs differ at B = " + b.get_str());
    row.records = m1.size();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace carmtab
