#pragma once

#include <filesystem>
#include <string>

#include "heitler/waveform/drive.hpp"

namespace heitler {

// CSV: "# sample_rate_hz=<f>,carrier_detuning_rad_per_s=<f>" annotation line,
// header time_s,re_field,im_field, one row per sample. Without the
// annotation the sample rate is taken from the time column.
std::string waveform_to_csv(const DriveWaveform& drive);
DriveWaveform waveform_from_csv(const std::string& text);

// Binary: "HWF1", u32 version = 1, f64 sample_rate, f64 carrier_detuning,
// u64 count, then count (re, im) f64 pairs; all little-endian.
std::string waveform_to_binary(const DriveWaveform& drive);
DriveWaveform waveform_from_binary(const std::string& bytes);

void write_waveform(const std::filesystem::path& path, const DriveWaveform& drive);
// Format picked by extension: .csv, anything else binary.
DriveWaveform read_waveform(const std::filesystem::path& path);

// Whole-file helpers shared by the readers and writers.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace heitler
