#include "heitler/waveform/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

namespace heitler {

namespace {

static_assert(std::endian::native == std::endian::little, "binary formats assume little-endian");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) {
    throw IoError(fmt::format("waveform file truncated at byte offset {}", pos));
  }
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string waveform_to_csv(const DriveWaveform& drive) {
  std::string out = fmt::format("# sample_rate_hz={:.17g},carrier_detuning_rad_per_s={:.17g}\n",
                                drive.sample_rate(), drive.carrier_detuning());
  out += "time_s,re_field,im_field\n";
  const auto s = drive.samples();
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += fmt::format("{:.17g},{:.17g},{:.17g}\n", drive.time(i), s[i].real(), s[i].imag());
  }
  return out;
}

DriveWaveform waveform_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  double rate = 0.0, detuning = 0.0;
  std::vector<double> t;
  std::vector<cplx> s;
  std::size_t row = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::sscanf(line.c_str(), "# sample_rate_hz=%lf,carrier_detuning_rad_per_s=%lf", &rate,
                  &detuning);
      continue;
    }
    if (!header) {
      if (line != "time_s,re_field,im_field") {
        throw IoError(fmt::format("waveform CSV row {}: expected header time_s,re_field,im_field",
                                  row));
      }
      header = true;
      continue;
    }
    double a, b, c;
    char tail;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf%c", &a, &b, &c, &tail) != 3) {
      throw IoError(fmt::format("waveform CSV row {}: expected three numbers", row));
    }
    t.push_back(a);
    s.emplace_back(b, c);
  }
  if (!header) throw IoError("waveform CSV: missing header");
  if (rate <= 0.0) {
    if (t.size() < 2) throw IoError("waveform CSV: cannot infer sample rate");
    rate = static_cast<double>(t.size() - 1) / (t.back() - t.front());
  }
  try {
    return DriveWaveform(std::move(s), rate, detuning);
  } catch (const PreconditionError& e) {
    throw IoError(std::string("waveform CSV: ") + e.what());
  }
}

std::string waveform_to_binary(const DriveWaveform& drive) {
  std::string out = "HWF1";
  put<std::uint32_t>(out, 1);
  put<double>(out, drive.sample_rate());
  put<double>(out, drive.carrier_detuning());
  put<std::uint64_t>(out, drive.size());
  for (const cplx& v : drive.samples()) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  return out;
}

DriveWaveform waveform_from_binary(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "HWF1") != 0) {
    throw IoError("waveform file: bad magic at byte offset 0");
  }
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != 1) throw IoError(fmt::format("waveform file: unsupported version {}", version));
  const double rate = get<double>(bytes, pos);
  const double detuning = get<double>(bytes, pos);
  const auto count = get<std::uint64_t>(bytes, pos);
  const std::size_t have = (bytes.size() - pos) / 16;
  if (have < count) {
    throw IoError(fmt::format("waveform file truncated: expected {} samples, found {}", count,
                              have));
  }
  std::vector<cplx> s(count);
  for (auto& v : s) {
    const double re = get<double>(bytes, pos);
    v = {re, get<double>(bytes, pos)};
  }
  try {
    return DriveWaveform(std::move(s), rate, detuning);
  } catch (const PreconditionError& e) {
    throw IoError(std::string("waveform file: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_waveform(const std::filesystem::path& path, const DriveWaveform& drive) {
  write_file(path, path.extension() == ".csv" ? waveform_to_csv(drive) : waveform_to_binary(drive));
}

DriveWaveform read_waveform(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  return path.extension() == ".csv" ? waveform_from_csv(bytes) : waveform_from_binary(bytes);
}

}  // namespace heitler
