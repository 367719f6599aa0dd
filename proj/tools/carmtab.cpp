// carmtab: command-line front end for the tabulation engine.
//
//   carmtab full   --bound 1e10 --out run10
//   carmtab small  --max-p 100000 --unbounded --out small
//   carmtab large  --bound 1e12 --crossover 10000 --d 7 --shard 0/4
//   carmtab merge  run*/carmichael.txt --bound 1e10 --out merged
//   carmtab verify merged/carmichael.txt
//   carmtab bench  --bound 1e9 --bound 1e10 --d 6
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 verification failure,
// 4 hard inputs left unresolved.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "carmtab/carmtab.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kVerify = 3, kHard = 4 };

struct Flags {
  std::string bound, crossover, shard = "0/1", out = ".", hard_report;
  std::optional<unsigned long long> min_p, max_p;
  std::optional<unsigned> d;
  bool unbounded = false;
  unsigned jobs = 1;
};

carmtab::TabulationConfig to_config(const Flags& f, carmtab::Mode mode) {
  carmtab::TabulationConfig cfg;
  cfg.mode = mode;
  if (!f.bound.empty()) cfg.bound = carmtab::parse_natural(f.bound);
  if (!f.crossover.empty()) {
    const auto x = carmtab::parse_natural(f.crossover);
    if (!mpz_fits_ulong_p(x.get_mpz_t())) throw carmtab::UsageError("crossover too large");
    cfg.crossover = x.get_ui();
  }
  cfg.shard = carmtab::parse_shard(f.shard);
  cfg.output_dir = f.out;
  cfg.bounded_small = !f.unbounded;
  cfg.d = f.d;
  cfg.min_p = f.min_p;
  cfg.max_p = f.max_p;
  if (!f.hard_report.empty()) cfg.hard_report = f.hard_report;
  cfg.jobs = f.jobs;
  if (mode == carmtab::Mode::Small && !cfg.bound) cfg.bounded_small = true;
  return cfg;
}

int tabulate(const Flags& f, carmtab::Mode mode) {
  const auto cfg = to_config(f, mode);
  const auto out = carmtab::run(cfg);
  carmtab::write_outputs(cfg, out);
  carmtab::write_text(std::cout, out.report);
  if (!out.hard_inputs.empty()) {
    std::cerr << out.hard_inputs.size() << " hard input(s) left unresolved; see the hard-input report\n";
    return kHard;
  }
  return kOk;
}

int merge(const std::vector<std::string>& files, const Flags& f) {
  std::vector<std::filesystem::path> paths(files.begin(), files.end());
  std::optional<carmtab::BigNatural> bound;
  if (!f.bound.empty()) bound = carmtab::parse_natural(f.bound);
  const auto out = carmtab::merge_count(paths, bound);
  if (f.out != ".") {
    std::filesystem::create_directories(f.out);
    carmtab::write_records(std::filesystem::path(f.out) / "carmichael.txt", out.records);
    carmtab::write_report(f.out, out.report);
  }
  carmtab::write_text(std::cout, out.report);
  return kOk;
}

int verify(const std::string& file) {
  const auto v = carmtab::verify_file(file);
  if (!v.ok) {
    std::cerr << v.message << '\n';
    std::cout << "FAIL after " << v.checked << " good record(s), line " << v.failed_line << '\n';
    return kVerify;
  }
  std::cout << "OK " << v.checked << " record(s)\n";
  return kOk;
}

int bench(const std::vector<std::string>& bounds, const Flags& f) {
  if (!f.d) throw carmtab::UsageError("bench needs --d");
  if (bounds.empty()) throw carmtab::UsageError("bench needs at least one --bound");
  std::vector<carmtab::BigNatural> bs;
  for (const auto& b : bounds) bs.push_back(carmtab::parse_natural(b));
  std::optional<carmtab::u64> x;
  if (!f.crossover.empty()) x = carmtab::parse_natural(f.crossover).get_ui();
  const auto rows = carmtab::bench_methods(bs, *f.d, x);
  std::cout << std::left << std::setw(24) << "bound" << std::right << std::setw(4) << "d" << std::setw(14)
            << "preproducts" << std::setw(10) << "records" << std::setw(14) << "method1_s" << std::setw(14)
            << "method2_s" << '\n';
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(24) << r.bound.get_str() << std::right << std::setw(4) << r.d << std::setw(14)
              << r.preproducts << std::setw(10) << r.records << std::fixed << std::setprecision(3) << std::setw(14)
              << r.residue_seconds << std::setw(14) << r.trial_seconds << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carmichael number tabulation"};
  app.require_subcommand(1);
  Flags f;
  std::vector<std::string> files, bounds;
  std::string verify_path;

  auto add_run_flags = [&](CLI::App* sub, bool small_flags, bool large_flags) {
    sub->add_option("--bound", f.bound, "upper bound B (e.g. 1e10, 10^12)");
    sub->add_option("--crossover", f.crossover, "crossover X (default ceil(B^(1/3)))");
    sub->add_option("--shard", f.shard, "shard i/n");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
    if (small_flags) {
      sub->add_option("--min-p", f.min_p, "smallest P (small mode)");
      sub->add_option("--max-p", f.max_p, "P below this (small mode)");
      sub->add_flag("--unbounded", f.unbounded, "keep small-case finds at or above B");
    }
    if (large_flags) {
      sub->add_option("--d", f.d, "only this factor count in the large case");
      sub->add_option("--hard-report", f.hard_report, "file for unresolved large-case inputs");
    }
  };
  auto* small = app.add_subcommand("small", "complete small preproducts P < X");
  add_run_flags(small, true, false);
  auto* large = app.add_subcommand("large", "complete large preproducts P >= X");
  add_run_flags(large, false, true);
  auto* full = app.add_subcommand("full", "small and large cases, merged");
  add_run_flags(full, true, true);
  auto* orc = app.add_subcommand("oracle", "brute-force tabulation (B <= 1e9)");
  orc->add_option("--bound", f.bound)->required();
  orc->add_option("--out", f.out);
  auto* mrg = app.add_subcommand("merge", "merge and count record files");
  mrg->add_option("files", files)->required();
  mrg->add_option("--bound", f.bound);
  mrg->add_option("--out", f.out);
  auto* ver = app.add_subcommand("verify", "re-check every record of a file");
  ver->add_option("file", verify_path)->required();
  auto* bch = app.add_subcommand("bench", "large case: residue search vs trial division");
  bch->add_option("--bound", bounds)->required();
  bch->add_option("--d", f.d)->required();
  bch->add_option("--crossover", f.crossover);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (small->parsed()) return tabulate(f, carmtab::Mode::Small);
    if (large->parsed()) return tabulate(f, carmtab::Mode::Large);
    if (full->parsed()) return tabulate(f, carmtab::Mode::Full);
    if (orc->parsed()) return tabulate(f, carmtab::Mode::Oracle);
    if (mrg->parsed()) return merge(files, f);
    if (ver->parsed()) return verify(verify_path);
    if (bch->parsed()) return bench(bounds, f);
  } catch (const carmtab::VerificationError& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return kVerify;
  } catch (const carmtab::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kIo;
  } catch (const carmtab::IoError& e) {
    std::cerr << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
