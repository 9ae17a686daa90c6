#include "atomcount/trace_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace atomcount {

std::string format_sig9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_sig17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  std::string body;
  body.reserve(trace.samples.size() * 28 + 256);
  body += "# dt=" + format_sig17(trace.dt) + "\n";
  body += "# t0=" + format_sig17(trace.t0) + "\n";
  body += "# seed=" + std::to_string(trace.meta.seed) + "\n";
  body += "# units=" + trace.meta.units + "\n";
  body += "# filters=";
  for (std::size_t i = 0; i < trace.meta.filter_cascade.size(); ++i) {
    if (i) body += ';';
    body += format_sig17(trace.meta.filter_cascade[i]);
  }
  body += "\n";

  char line[96];
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    int n = std::snprintf(line, sizeof line, "%.9g,%.9g\n", trace.time_of(i),
                          trace.samples[i]);
    body.append(line, static_cast<std::size_t>(n));
  }
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

double parse_double(const std::string& s, const std::string& path, long line) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || errno == ERANGE)
    throw std::runtime_error(path + ":" + std::to_string(line) +
                             ": malformed number '" + s + "'");
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  if (*end != '\0')
    throw std::runtime_error(path + ":" + std::to_string(line) +
                             ": trailing garbage in '" + s + "'");
  return v;
}

}  // namespace

Trace read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);

  Trace tr;
  tr.samples.clear();
  bool have_dt = false, have_t0 = false;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string kv = line.substr(1);
      std::size_t start = kv.find_first_not_of(' ');
      if (start == std::string::npos) continue;
      kv = kv.substr(start);
      std::size_t eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": malformed header line");
      std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "dt") {
        tr.dt = parse_double(val, path, lineno);
        have_dt = true;
      } else if (key == "t0") {
        tr.t0 = parse_double(val, path, lineno);
        have_t0 = true;
      } else if (key == "seed") {
        tr.meta.seed = std::strtoull(val.c_str(), nullptr, 10);
      } else if (key == "units") {
        tr.meta.units = val;
      } else if (key == "filters") {
        tr.meta.filter_cascade.clear();
        std::stringstream ss(val);
        std::string tok;
        while (std::getline(ss, tok, ';'))
          if (!tok.empty())
            tr.meta.filter_cascade.push_back(parse_double(tok, path, lineno));
      } else {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": unknown header key '" + key + "'");
      }
      continue;
    }
    std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'time,amplitude'");
    parse_double(line.substr(0, comma), path, lineno);  // validate time field
    tr.samples.push_back(parse_double(line.substr(comma + 1), path, lineno));
  }
  if (!have_dt || !have_t0)
    throw std::runtime_error(path + ": missing dt/t0 header");
  if (!(tr.dt > 0.0))
    throw std::runtime_error(path + ": nonpositive dt in header");
  if (tr.samples.empty()) throw std::runtime_error(path + ": no samples");
  return tr;
}

}  // namespace atomcount
