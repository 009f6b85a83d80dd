#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "heitler/photon/detection.hpp"

namespace heitler {

enum class TagFormat { ptt1, csv };

// PTT1: "PTT1", u32 version = 1, u32 channel_count, u32 resolution_ps = 1,
// u64 record_count, then packed 9-byte records {u64 timestamp_ps, u8 channel},
// little-endian. CSV: header timestamp_ps,channel and one record per row.
// Records are stored merged in time order; decoding checks that every
// channel is non-decreasing.
std::string encode_ptt1(const std::vector<PhotonStream>& streams);
std::vector<PhotonStream> decode_ptt1(const std::string& bytes);
std::string encode_tag_csv(const std::vector<PhotonStream>& streams);
std::vector<PhotonStream> decode_tag_csv(const std::string& text);

// One stream per channel, index = channel id.
std::vector<PhotonStream> import_timetags(const std::filesystem::path& path, TagFormat format);
void export_timetags(const std::filesystem::path& path, const std::vector<PhotonStream>& streams,
                     TagFormat format);

TagFormat tag_format_from_name(const std::string& name);

}  // namespace heitler
