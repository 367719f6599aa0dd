#pragma once

// Record files: one Carmichael number per line, "n p1 p2 ... pd", ASCII
// decimal, single spaces, '\n' terminated.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "carmtab/korselt.hpp"

namespace carmtab {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string where, std::size_t line, const std::string& what)
      : std::runtime_error(where + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_record(const CarmichaelRecord& rec) {
  std::string s = rec.n.get_str();
  for (const auto& p : rec.primes) {
    s += ' ';
    s += p.get_str();
  }
  return s;
}

/// Parses one line. Checks syntax and that n is the product of the listed
/// primes in ascending order; Korselt's criterion is left to the caller.
inline CarmichaelRecord parse_record(const std::string& line, const std::string& where = "<input>",
                                     std::size_t line_no = 0) {
  CarmichaelRecord rec;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= line.size()) {
    const std::size_t next = line.find(' ', pos);
    const std::string field = line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (field.empty() || field.find_first_not_of("0123456789") != std::string::npos || (field.size() > 1 && field[0] == '0'))
      throw ParseError(where, line_no, "malformed field '" + field + "'");
    BigNatural v(field, 10);
    if (first)
      rec.n = std::move(v);
    else
      rec.primes.push_back(std::move(v));
    first = false;
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (rec.primes.empty()) throw ParseError(where, line_no, "record lists no prime factors");
  BigNatural prod = 1;
  for (std::size_t i = 0; i < rec.primes.size(); ++i) {
    if (i > 0 && rec.primes[i] <= rec.primes[i - 1]) throw ParseError(where, line_no, "factors not ascending");
    prod *= rec.primes[i];
  }
  if (prod != rec.n) throw ParseError(where, line_no, "n is not the product of the listed factors");
  return rec;
}

inline std::vector<CarmichaelRecord> read_records(std::istream& in, const std::string& where = "<input>") {
  std::vector<CarmichaelRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    out.push_back(parse_record(line, where, line_no));
  }
  return out;
}

inline std::vector<CarmichaelRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return read_records(in, path.string());
}

inline void write_records(std::ostream& out, const std::vector<CarmichaelRecord>& records) {
  for (const auto& r : records) out << format_record(r) << '\n';
}

inline void write_records(const std::filesystem::path& path, const std::vector<CarmichaelRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_records(out, records);
  if (!out) throw IoError("write failed: " + path.string());
}

/// Sorts by n and removes duplicates.
inline void normalize(std::vector<CarmichaelRecord>& records) {
  std::sort(records.begin(), records.end());
  records.erase(std::unique(records.begin(), records.end()), records.end());
}

}  // namespace carmtab
