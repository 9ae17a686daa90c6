#pragma once

#include <string>

#include "atomcount/detection.hpp"

namespace atomcount {

// 9 significant decimal digits; enough for byte-stable regression files and
// idempotent under a write/read/write cycle.
std::string format_sig9(double v);

// Full-precision form, used where read-back identity matters (config values,
// trace header timing).
std::string format_sig17(double v);

// Trace file layout: comment header lines "# key=value" carrying dt, t0,
// seed, units and the applied filter cascade, then one "time,amplitude"
// sample per line with 9 significant digits.
void write_trace_csv(const std::string& path, const Trace& trace);

Trace read_trace_csv(const std::string& path);

}  // namespace atomcount
