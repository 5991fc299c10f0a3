#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dwiseg/volume.hpp"

namespace dwiseg {

/// Contents of a volume container's meta.json.
struct ContainerMeta {
    std::string kind;  // "signal", "adc" or "labels"
    std::string dtype; // "f32le" or "u8"
    Grid3 grid;
    int bands = 1;
    std::vector<double> b_values;                  // signal containers
    std::map<std::uint8_t, std::string> classes;   // label containers
};

// A volume container is a directory holding meta.json plus data.raw with the
// voxel payload, x-fastest then y then z, bands concatenated. Scalar data is
// little-endian float32, labels are u8.

void write_signal(const std::filesystem::path& dir, const MultispectralVolume& ms);
MultispectralVolume read_signal(const std::filesystem::path& dir);

void write_scalar(const std::filesystem::path& dir, const Volume& volume,
                  const std::string& kind = "adc");
Volume read_scalar(const std::filesystem::path& dir, const std::string& expected_kind = "adc");

void write_labels(const std::filesystem::path& dir, const LabelVolume& labels,
                  const std::map<std::uint8_t, std::string>& class_names = {});
LabelVolume read_labels(const std::filesystem::path& dir);

ContainerMeta read_meta(const std::filesystem::path& dir);

} // namespace dwiseg
