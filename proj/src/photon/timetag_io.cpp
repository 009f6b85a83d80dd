#include "heitler/photon/timetag_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fmt/format.h>
#include <sstream>

#include "heitler/common.hpp"
#include "heitler/waveform/io.hpp"

namespace heitler {

namespace {

static_assert(std::endian::native == std::endian::little, "PTT1 assumes little-endian");

constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 8;
constexpr std::size_t kRecordBytes = 9;

std::vector<PhotonRecord> merge(const std::vector<PhotonStream>& streams) {
  std::vector<PhotonRecord> all;
  for (std::size_t c = 0; c < streams.size(); ++c) {
    for (const PhotonRecord& r : streams[c]) {
      all.push_back({r.timestamp_ps, static_cast<std::uint8_t>(c)});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const PhotonRecord& a, const PhotonRecord& b) {
    return a.timestamp_ps < b.timestamp_ps;
  });
  return all;
}

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t pos) {
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  return v;
}

}  // namespace

std::string encode_ptt1(const std::vector<PhotonStream>& streams) {
  if (streams.size() > 256) throw PreconditionError("PTT1 supports at most 256 channels");
  const std::vector<PhotonRecord> all = merge(streams);
  std::string out = "PTT1";
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(streams.size()));
  put<std::uint32_t>(out, 1);
  put<std::uint64_t>(out, all.size());
  out.reserve(out.size() + all.size() * kRecordBytes);
  for (const PhotonRecord& r : all) {
    put<std::uint64_t>(out, static_cast<std::uint64_t>(r.timestamp_ps));
    put<std::uint8_t>(out, r.channel);
  }
  return out;
}

std::vector<PhotonStream> decode_ptt1(const std::string& bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw IoError(fmt::format("PTT1: header truncated, {} of {} bytes", bytes.size(),
                              kHeaderBytes));
  }
  if (bytes.compare(0, 4, "PTT1") != 0) throw IoError("PTT1: bad magic at byte offset 0");
  const auto version = get<std::uint32_t>(bytes, 4);
  if (version != 1) {
    throw IoError(fmt::format("PTT1: unsupported version {} at byte offset 4", version));
  }
  const auto channels = get<std::uint32_t>(bytes, 8);
  if (channels == 0 || channels > 256) {
    throw IoError(fmt::format("PTT1: invalid channel count {} at byte offset 8", channels));
  }
  const auto resolution = get<std::uint32_t>(bytes, 12);
  if (resolution != 1) {
    throw IoError(fmt::format("PTT1: resolution_ps {} at byte offset 12, expected 1", resolution));
  }
  const auto count = get<std::uint64_t>(bytes, 16);
  const std::size_t found = (bytes.size() - kHeaderBytes) / kRecordBytes;
  if (found < count) {
    throw IoError(fmt::format("PTT1: truncated, expected {} records, found {}", count, found));
  }
  if (bytes.size() != kHeaderBytes + count * kRecordBytes) {
    throw IoError(fmt::format("PTT1: trailing bytes after {} records at byte offset {}", count,
                              kHeaderBytes + count * kRecordBytes));
  }
  std::vector<PhotonStream> out(channels);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t off = kHeaderBytes + i * kRecordBytes;
    const auto ts = get<std::uint64_t>(bytes, off);
    const auto ch = get<std::uint8_t>(bytes, off + 8);
    if (ch >= channels) {
      throw IoError(fmt::format("PTT1: channel {} out of range at byte offset {}", ch, off + 8));
    }
    if (ts > static_cast<std::uint64_t>(INT64_MAX)) {
      throw IoError(fmt::format("PTT1: timestamp overflow at byte offset {}", off));
    }
    PhotonStream& s = out[ch];
    const auto t = static_cast<std::int64_t>(ts);
    if (!s.empty() && t < s.back().timestamp_ps) {
      throw IoError(fmt::format(
          "PTT1: channel {} not monotonic at record {} (byte offset {})", ch, i, off));
    }
    s.push_back({t, ch});
  }
  return out;
}

std::string encode_tag_csv(const std::vector<PhotonStream>& streams) {
  std::string out = "timestamp_ps,channel\n";
  for (const PhotonRecord& r : merge(streams)) {
    out += fmt::format("{},{}\n", r.timestamp_ps, r.channel);
  }
  return out;
}

std::vector<PhotonStream> decode_tag_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  bool header = false;
  std::vector<PhotonStream> out;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "timestamp_ps,channel") {
        throw IoError(fmt::format("time-tag CSV row {}: expected header timestamp_ps,channel", row));
      }
      header = true;
      continue;
    }
    long long ts;
    unsigned ch;
    char tail;
    if (std::sscanf(line.c_str(), "%lld,%u%c", &ts, &ch, &tail) != 2 || ch > 255 || ts < 0) {
      throw IoError(fmt::format("time-tag CSV row {}: malformed record '{}'", row, line));
    }
    if (ch >= out.size()) out.resize(ch + 1);
    PhotonStream& s = out[ch];
    if (!s.empty() && ts < s.back().timestamp_ps) {
      throw IoError(fmt::format("time-tag CSV row {}: out of order on channel {}", row, ch));
    }
    s.push_back({ts, static_cast<std::uint8_t>(ch)});
  }
  if (!header) throw IoError("time-tag CSV: missing header");
  return out;
}

std::vector<PhotonStream> import_timetags(const std::filesystem::path& path, TagFormat format) {
  const std::string bytes = read_file(path);
  try {
    return format == TagFormat::ptt1 ? decode_ptt1(bytes) : decode_tag_csv(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void export_timetags(const std::filesystem::path& path, const std::vector<PhotonStream>& streams,
                     TagFormat format) {
  write_file(path, format == TagFormat::ptt1 ? encode_ptt1(streams) : encode_tag_csv(streams));
}

TagFormat tag_format_from_name(const std::string& name) {
  if (name == "ptt1") return TagFormat::ptt1;
  if (name == "csv") return TagFormat::csv;
  throw ValidationError("unknown time-tag format '" + name + "' (expected ptt1 or csv)");
}

}  // namespace heitler
