#pragma once

// Trace files.
//
// CSV: comment header lines `# key=value` (sample_rate, gesture, snr_db,
// seed, and optionally subject, distance_m), then one amplitude per line in
// shortest round-trip decimal form. Absent keys are omitted; a noiseless
// trace writes `snr_db=inf`.
//
// Binary (little-endian, 64-byte header, then float32 samples):
//   0  char[4] magic "RFTR"     4  u32 version (1)
//   8  f64 sample_rate          16 f64 snr_db (NaN = absent)
//   24 u64 seed                 32 u64 sample count
//   40 i32 gesture (-1 absent)  44 i32 subject (-1 absent)
//   48 f64 distance_m (NaN)     56 u32 flags (bit 0: seed present)
//   60 u32 reserved (0)

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "rfdfar/trace.hpp"

namespace rfdfar::io {

enum class TraceFormat { Csv, Binary };

TraceFormat parse_trace_format(std::string_view name);

void write_trace_csv(std::ostream& out, const Trace& trace);
Trace read_trace_csv(std::istream& in);

void write_trace_binary(std::ostream& out, const Trace& trace);
Trace read_trace_binary(std::istream& in);

void write_trace(const std::filesystem::path& path, const Trace& trace, TraceFormat format);

/// Reads either format, detected from the magic bytes.
Trace read_trace(const std::filesystem::path& path);

}  // namespace rfdfar::io
