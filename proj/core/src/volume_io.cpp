#include "dwiseg/volume_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace dwiseg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open " + path.string() + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f)
        throw IoError("short write to " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return bytes;
}

void append_f32le(std::string& out, double v) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    char b[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                 static_cast<char>((u >> 16) & 0xff), static_cast<char>((u >> 24) & 0xff)};
    out.append(b, 4);
}

double parse_f32le(const char* p) {
    std::uint32_t u = (static_cast<std::uint32_t>(static_cast<unsigned char>(p[0]))) |
                      (static_cast<std::uint32_t>(static_cast<unsigned char>(p[1])) << 8) |
                      (static_cast<std::uint32_t>(static_cast<unsigned char>(p[2])) << 16) |
                      (static_cast<std::uint32_t>(static_cast<unsigned char>(p[3])) << 24);
    return static_cast<double>(std::bit_cast<float>(u));
}

void write_meta(const fs::path& dir, const ContainerMeta& meta) {
    json j;
    j["kind"] = meta.kind;
    j["dtype"] = meta.dtype;
    j["nx"] = meta.grid.nx;
    j["ny"] = meta.grid.ny;
    j["nz"] = meta.grid.nz;
    j["bands"] = meta.bands;
    j["order"] = "x-fastest";
    if (!meta.b_values.empty())
        j["b_values"] = meta.b_values;
    if (!meta.classes.empty()) {
        json classes = json::object();
        for (const auto& [label, name] : meta.classes)
            classes[std::to_string(label)] = name;
        j["classes"] = classes;
    }
    write_file(dir / "meta.json", j.dump(2) + "\n");
}

std::map<std::uint8_t, std::string> default_class_names() {
    return {{label_of(Tissue::Csf), "csf"},
            {label_of(Tissue::Matter), "matter"},
            {label_of(Tissue::Background), "background"}};
}

} // namespace

ContainerMeta read_meta(const fs::path& dir) {
    json j;
    try {
        j = json::parse(read_file(dir / "meta.json"));
    } catch (const json::exception& e) {
        throw IoError("invalid meta.json in " + dir.string() + ": " + e.what());
    }
    ContainerMeta meta;
    try {
        meta.kind = j.at("kind").get<std::string>();
        meta.dtype = j.at("dtype").get<std::string>();
        meta.grid = {j.at("nx").get<int>(), j.at("ny").get<int>(), j.at("nz").get<int>()};
        meta.bands = j.value("bands", 1);
        if (j.contains("b_values"))
            meta.b_values = j.at("b_values").get<std::vector<double>>();
        if (j.contains("classes"))
            for (const auto& [key, value] : j.at("classes").items())
                meta.classes[static_cast<std::uint8_t>(std::stoi(key))] =
                    value.get<std::string>();
    } catch (const json::exception& e) {
        throw IoError("missing field in meta.json: " + std::string(e.what()));
    } catch (const std::exception& e) {
        throw IoError("malformed meta.json: " + std::string(e.what()));
    }
    meta.grid.validate();
    if (meta.bands < 1)
        throw IoError("meta.json declares no bands");
    return meta;
}

void write_signal(const fs::path& dir, const MultispectralVolume& ms) {
    if (ms.bands.empty())
        throw InvalidInput("no bands to write");
    fs::create_directories(dir);
    ContainerMeta meta;
    meta.kind = "signal";
    meta.dtype = "f32le";
    meta.grid = ms.grid();
    meta.bands = ms.band_count();
    meta.b_values = ms.b_values;
    write_meta(dir, meta);

    std::string raw;
    raw.reserve(ms.grid().voxels() * ms.bands.size() * 4);
    for (const Volume& band : ms.bands) {
        if (!(band.grid == ms.grid()))
            throw InvalidInput("bands must share one grid");
        for (double v : band.data)
            append_f32le(raw, v);
    }
    write_file(dir / "data.raw", raw);
}

MultispectralVolume read_signal(const fs::path& dir) {
    ContainerMeta meta = read_meta(dir);
    if (meta.kind != "signal")
        throw IoError("container " + dir.string() + " holds '" + meta.kind + "', not signal");
    if (meta.dtype != "f32le")
        throw IoError("signal containers must be f32le");
    std::string raw = read_file(dir / "data.raw");
    const std::size_t voxels = meta.grid.voxels();
    if (raw.size() != voxels * meta.bands * 4)
        throw IoError("data.raw size does not match meta (" + std::to_string(raw.size()) +
                      " bytes)");

    MultispectralVolume ms;
    ms.b_values = meta.b_values;
    const char* p = raw.data();
    for (int b = 0; b < meta.bands; ++b) {
        Volume vol(meta.grid);
        for (std::size_t v = 0; v < voxels; ++v, p += 4)
            vol.data[v] = parse_f32le(p);
        ms.bands.push_back(std::move(vol));
    }
    return ms;
}

void write_scalar(const fs::path& dir, const Volume& volume, const std::string& kind) {
    fs::create_directories(dir);
    ContainerMeta meta;
    meta.kind = kind;
    meta.dtype = "f32le";
    meta.grid = volume.grid;
    meta.bands = 1;
    write_meta(dir, meta);

    std::string raw;
    raw.reserve(volume.data.size() * 4);
    for (double v : volume.data)
        append_f32le(raw, v);
    write_file(dir / "data.raw", raw);
}

Volume read_scalar(const fs::path& dir, const std::string& expected_kind) {
    ContainerMeta meta = read_meta(dir);
    if (!expected_kind.empty() && meta.kind != expected_kind)
        throw IoError("container " + dir.string() + " holds '" + meta.kind + "', not " +
                      expected_kind);
    if (meta.dtype != "f32le" || meta.bands != 1)
        throw IoError("scalar containers must be single-band f32le");
    std::string raw = read_file(dir / "data.raw");
    const std::size_t voxels = meta.grid.voxels();
    if (raw.size() != voxels * 4)
        throw IoError("data.raw size does not match meta");
    Volume vol(meta.grid);
    const char* p = raw.data();
    for (std::size_t v = 0; v < voxels; ++v, p += 4)
        vol.data[v] = parse_f32le(p);
    return vol;
}

void write_labels(const fs::path& dir, const LabelVolume& labels,
                  const std::map<std::uint8_t, std::string>& class_names) {
    fs::create_directories(dir);
    ContainerMeta meta;
    meta.kind = "labels";
    meta.dtype = "u8";
    meta.grid = labels.grid;
    meta.bands = 1;
    meta.classes = class_names.empty() ? default_class_names() : class_names;
    write_meta(dir, meta);

    std::string raw(reinterpret_cast<const char*>(labels.data.data()), labels.data.size());
    write_file(dir / "data.raw", raw);
}

LabelVolume read_labels(const fs::path& dir) {
    ContainerMeta meta = read_meta(dir);
    if (meta.kind != "labels")
        throw IoError("container " + dir.string() + " holds '" + meta.kind + "', not labels");
    if (meta.dtype != "u8" || meta.bands != 1)
        throw IoError("label containers must be single-band u8");
    std::string raw = read_file(dir / "data.raw");
    if (raw.size() != meta.grid.voxels())
        throw IoError("data.raw size does not match meta");
    LabelVolume labels(meta.grid);
    std::memcpy(labels.data.data(), raw.data(), raw.size());
    return labels;
}

} // namespace dwiseg
