#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "toppleone/mc_harness.hpp"

namespace toppleone {

inline std::string to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::mle: return "mle";
    case EstimatorKind::umvue: return "umvue";
    case EstimatorKind::pce: return "pce";
    case EstimatorKind::lse: return "lse";
    case EstimatorKind::wlse: return "wlse";
  }
  throw std::invalid_argument("to_string: unknown estimator kind");
}

inline EstimatorKind estimator_from_string(std::string_view s) {
  if (s == "mle") return EstimatorKind::mle;
  if (s == "umvue") return EstimatorKind::umvue;
  if (s == "pce") return EstimatorKind::pce;
  if (s == "lse") return EstimatorKind::lse;
  if (s == "wlse") return EstimatorKind::wlse;
  throw std::invalid_argument("unknown estimator name: " + std::string(s));
}

inline std::string to_string(Target t) {
  return t == Target::pdf ? "pdf" : "cdf";
}

inline Target target_from_string(std::string_view s) {
  if (s == "pdf") return Target::pdf;
  if (s == "cdf") return Target::cdf;
  throw std::invalid_argument("unknown target name: " + std::string(s));
}

/// Shortest representation that round-trips a double exactly.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline constexpr const char* kCsvHeader =
    "estimator,n,alpha,target,mse,mc_se,reps,seed,grid,failures";

/// Writes the record rows plus a trailing comment carrying generator and
/// artifact identification. The file appears atomically: content goes to a
/// temporary sibling first and is renamed into place.
inline void write_mse_csv(const std::filesystem::path& out,
                          const std::vector<MseRecord>& records,
                          std::string_view trailer_comment) {
  const std::filesystem::path tmp = out.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + tmp.string());
    f << kCsvHeader << '\n';
    for (const auto& r : records) {
      f << to_string(r.estimator) << ',' << r.n << ',' << format_g17(r.alpha)
        << ',' << to_string(r.target) << ',' << format_g17(r.mse) << ','
        << format_g17(r.mc_se) << ',' << r.reps << ',' << r.seed << ','
        << r.grid << ',' << r.failures << '\n';
    }
    f << "# " << trailer_comment << '\n';
    if (!f.flush()) {
      f.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, out, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " into place: " +
                             ec.message());
  }
}

struct CsvContents {
  std::vector<MseRecord> records;
  std::vector<std::string> comments;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

/// Parses a file produced by write_mse_csv back into records.
inline CsvContents read_mse_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path.string());
  CsvContents out;
  std::string line;
  bool saw_header = false;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      out.comments.push_back(line);
      continue;
    }
    if (!saw_header) {
      if (line != kCsvHeader)
        throw std::runtime_error("unexpected CSV header: " + line);
      saw_header = true;
      continue;
    }
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 10)
      throw std::runtime_error("malformed CSV row: " + line);
    MseRecord r{estimator_from_string(fields[0]),
                std::stoi(fields[1]),
                std::stod(fields[2]),
                target_from_string(fields[3]),
                std::stod(fields[4]),
                std::stod(fields[5]),
                std::stoull(fields[6]),
                std::stoull(fields[7]),
                fields[8],
                std::stoull(fields[9])};
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace toppleone
