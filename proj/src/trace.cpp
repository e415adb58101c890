#include "mcsd/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcsd/errors.hpp"

namespace mcsd {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : trace.records) {
    out << r.iter << ',' << format_double(r.objective) << ',' << format_double(r.subspace_error) << ','
        << format_double(r.orth_violation) << ',' << format_double(r.grad_dual_norm) << ','
        << format_double(r.step_size) << ',' << r.inner_iters << ',' << format_double(r.elapsed_s) << '\n';
  }
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

RunTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty trace file");
  if (line != kTraceHeader) throw ConfigError(path.string() + ": unexpected trace header");
  RunTrace trace;
  trace.method = path.stem().string();
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 8 columns");
    try {
      TraceRecord r;
      r.iter = std::stol(cells[0]);
      r.objective = std::stod(cells[1]);
      r.subspace_error = std::stod(cells[2]);
      r.orth_violation = std::stod(cells[3]);
      r.grad_dual_norm = std::stod(cells[4]);
      r.step_size = std::stod(cells[5]);
      r.inner_iters = std::stol(cells[6]);
      r.elapsed_s = std::stod(cells[7]);
      trace.records.push_back(r);
    } catch (const std::exception&) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return trace;
}

}  // namespace mcsd
