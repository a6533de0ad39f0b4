#include "rfdfar/trace_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rfdfar/text.hpp"

namespace rfdfar::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary trace format assumes a little-endian host");

constexpr std::array<char, 4> kMagic{'R', 'F', 'T', 'R'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 64;

template <typename T>
void put(std::array<char, kHeaderSize>& buf, std::size_t offset, T value) {
  std::memcpy(buf.data() + offset, &value, sizeof value);
}

template <typename T>
T get(const std::array<char, kHeaderSize>& buf, std::size_t offset) {
  T value;
  std::memcpy(&value, buf.data() + offset, sizeof value);
  return value;
}

void set_meta(TraceMeta& meta, double& sample_rate, std::string_view key, std::string_view value) {
  if (key == "sample_rate") {
    sample_rate = text::parse_double(value);
  } else if (key == "gesture") {
    auto g = parse_gesture(value);
    if (!g) throw std::invalid_argument("trace csv: unknown gesture '" + std::string(value) + "'");
    meta.gesture = *g;
  } else if (key == "snr_db") {
    meta.snr_db = text::parse_double(value);
  } else if (key == "seed") {
    meta.seed = static_cast<std::uint64_t>(std::stoull(std::string(value)));
  } else if (key == "subject") {
    meta.subject = static_cast<int>(text::parse_int(value));
  } else if (key == "distance_m") {
    meta.distance_m = text::parse_double(value);
  }
  // Unknown keys are ignored so newer writers stay readable.
}

}  // namespace

TraceFormat parse_trace_format(std::string_view name) {
  if (name == "csv") return TraceFormat::Csv;
  if (name == "binary") return TraceFormat::Binary;
  throw std::invalid_argument("unknown trace format '" + std::string(name) + "'");
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "# sample_rate=" << text::format_double(trace.sample_rate) << '\n';
  const auto& m = trace.meta;
  if (m.gesture) out << "# gesture=" << to_string(*m.gesture) << '\n';
  if (m.snr_db) out << "# snr_db=" << text::format_double(*m.snr_db) << '\n';
  if (m.seed) out << "# seed=" << *m.seed << '\n';
  if (m.subject) out << "# subject=" << *m.subject << '\n';
  if (m.distance_m) out << "# distance_m=" << text::format_double(*m.distance_m) << '\n';
  std::string buf;
  for (double s : trace.samples) {
    buf += text::format_double(s);
    buf += '\n';
    if (buf.size() > (1u << 16)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
  if (!out) throw std::runtime_error("trace csv: write failed");
}

Trace read_trace_csv(std::istream& in) {
  Trace t;
  t.sample_rate = std::numeric_limits<double>::quiet_NaN();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = text::trim(line);
    if (v.empty()) continue;
    if (v.front() == '#') {
      v.remove_prefix(1);
      auto eq = v.find('=');
      if (eq == std::string_view::npos) continue;
      set_meta(t.meta, t.sample_rate, text::trim(v.substr(0, eq)), text::trim(v.substr(eq + 1)));
      continue;
    }
    try {
      t.samples.push_back(text::parse_double(v));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("trace csv line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (std::isnan(t.sample_rate)) throw std::invalid_argument("trace csv: missing sample_rate header");
  t.validate();
  return t;
}

void write_trace_binary(std::ostream& out, const Trace& trace) {
  std::array<char, kHeaderSize> h{};
  std::memcpy(h.data(), kMagic.data(), kMagic.size());
  const auto& m = trace.meta;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  put<std::uint32_t>(h, 4, kVersion);
  put<double>(h, 8, trace.sample_rate);
  put<double>(h, 16, m.snr_db.value_or(nan));
  put<std::uint64_t>(h, 24, m.seed.value_or(0));
  put<std::uint64_t>(h, 32, trace.samples.size());
  put<std::int32_t>(h, 40, m.gesture ? static_cast<std::int32_t>(*m.gesture) : -1);
  put<std::int32_t>(h, 44, m.subject.value_or(-1));
  put<double>(h, 48, m.distance_m.value_or(nan));
  put<std::uint32_t>(h, 56, m.seed ? 1u : 0u);
  put<std::uint32_t>(h, 60, 0u);
  out.write(h.data(), h.size());

  std::vector<float> samples(trace.samples.begin(), trace.samples.end());
  out.write(reinterpret_cast<const char*>(samples.data()),
            static_cast<std::streamsize>(samples.size() * sizeof(float)));
  if (!out) throw std::runtime_error("trace binary: write failed");
}

Trace read_trace_binary(std::istream& in) {
  std::array<char, kHeaderSize> h{};
  if (!in.read(h.data(), h.size())) throw std::invalid_argument("trace binary: truncated header");
  if (std::memcmp(h.data(), kMagic.data(), kMagic.size()) != 0) {
    throw std::invalid_argument("trace binary: bad magic");
  }
  if (get<std::uint32_t>(h, 4) != kVersion) {
    throw std::invalid_argument("trace binary: unsupported version");
  }
  Trace t;
  t.sample_rate = get<double>(h, 8);
  if (double snr = get<double>(h, 16); !std::isnan(snr)) t.meta.snr_db = snr;
  if (get<std::uint32_t>(h, 56) & 1u) t.meta.seed = get<std::uint64_t>(h, 24);
  const auto count = get<std::uint64_t>(h, 32);
  if (auto g = get<std::int32_t>(h, 40); g >= 0) {
    if (static_cast<std::size_t>(g) >= all_gestures().size()) {
      throw std::invalid_argument("trace binary: bad gesture code");
    }
    t.meta.gesture = static_cast<GestureLabel>(g);
  }
  if (auto s = get<std::int32_t>(h, 44); s >= 0) t.meta.subject = s;
  if (double d = get<double>(h, 48); !std::isnan(d)) t.meta.distance_m = d;

  std::vector<float> samples(count);
  if (!in.read(reinterpret_cast<char*>(samples.data()),
               static_cast<std::streamsize>(count * sizeof(float)))) {
    throw std::invalid_argument("trace binary: truncated samples");
  }
  t.samples.assign(samples.begin(), samples.end());
  t.validate();
  return t;
}

void write_trace(const std::filesystem::path& path, const Trace& trace, TraceFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  if (format == TraceFormat::Csv) {
    write_trace_csv(out, trace);
  } else {
    write_trace_binary(out, trace);
  }
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  char magic[4] = {};
  in.read(magic, 4);
  const bool binary = in.gcount() == 4 && std::memcmp(magic, kMagic.data(), 4) == 0;
  in.clear();
  in.seekg(0);
  return binary ? read_trace_binary(in) : read_trace_csv(in);
}

}  // namespace rfdfar::io
