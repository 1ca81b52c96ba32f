#pragma once

// File formats.
//
// Image:    <name>.json  {"width", "height", "pixel_size", "dtype": "f64le"}
//           <name>.bin   width*height little-endian float64, row-major
// Sinogram: <name>.json  {"num_projections", "num_bins", "bin_spacing"}
//           (+ optional "support_radius", "angles")
//           <name>.bin   N*B little-endian float64, projection-major
// Results:  CSV with a header row.

#include <uvtomo/error.hpp>
#include <uvtomo/image.hpp>
#include <uvtomo/sinogram.hpp>

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace uvtomo::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline fs::path payload_path(const fs::path& header) {
    fs::path p = header;
    p.replace_extension(".bin");
    return p;
}

namespace detail {

inline std::uint64_t bswap64(std::uint64_t v) {
    v = ((v & 0x00000000FFFFFFFFULL) << 32) | ((v & 0xFFFFFFFF00000000ULL) >> 32);
    v = ((v & 0x0000FFFF0000FFFFULL) << 16) | ((v & 0xFFFF0000FFFF0000ULL) >> 16);
    v = ((v & 0x00FF00FF00FF00FFULL) << 8) | ((v & 0xFF00FF00FF00FF00ULL) >> 8);
    return v;
}

inline void write_f64le(const fs::path& path, std::span<const double> values) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    std::vector<std::uint64_t> raw(values.size());
    std::memcpy(raw.data(), values.data(), values.size() * sizeof(double));
    if constexpr (std::endian::native == std::endian::big)
        for (auto& r : raw) r = bswap64(r);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 8));
    if (!out) throw FormatError("short write to " + path.string());
}

inline std::vector<double> read_f64le(const fs::path& path, std::size_t count) {
    std::error_code ec;
    const auto size = fs::file_size(path, ec);
    if (ec) throw FormatError("cannot stat payload " + path.string());
    if (size != count * 8)
        throw FormatError("payload " + path.string() + " has " + std::to_string(size) + " bytes, expected " +
                          std::to_string(count * 8));
    std::ifstream in(path, std::ios::binary);
    std::vector<std::uint64_t> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * 8));
    if (!in) throw FormatError("short read from " + path.string());
    if constexpr (std::endian::native == std::endian::big)
        for (auto& r : raw) r = bswap64(r);
    std::vector<double> values(count);
    std::memcpy(values.data(), raw.data(), count * 8);
    for (double v : values)
        if (!std::isfinite(v)) throw FormatError("non-finite value in " + path.string());
    return values;
}

inline json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

inline void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

template <class T>
T field(const json& j, const char* key, const fs::path& where) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(where.string() + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(where.string() + ": field '" + std::string(key) + "' has the wrong type");
    }
}

} // namespace detail

using detail::read_json;
using detail::write_json;

inline void write_image(const fs::path& header, const Image2D& img) {
    json h = {{"width", img.width()}, {"height", img.height()}, {"pixel_size", img.pixel_size()}, {"dtype", "f64le"}};
    detail::write_json(header, h);
    detail::write_f64le(payload_path(header), img.pixels());
}

inline Image2D read_image(const fs::path& header) {
    const json h = detail::read_json(header);
    const auto w = detail::field<long long>(h, "width", header);
    const auto ht = detail::field<long long>(h, "height", header);
    const auto px = detail::field<double>(h, "pixel_size", header);
    if (h.contains("dtype") && h["dtype"] != "f64le") throw FormatError(header.string() + ": unsupported dtype");
    if (w <= 0 || ht <= 0) throw FormatError(header.string() + ": non-positive dimensions");
    if (!(px > 0.0) || !std::isfinite(px)) throw FormatError(header.string() + ": pixel_size must be positive");
    auto data = detail::read_f64le(payload_path(header), static_cast<std::size_t>(w * ht));
    return Image2D(static_cast<std::size_t>(w), static_cast<std::size_t>(ht), px, std::move(data));
}

inline void write_sinogram(const fs::path& header, const Sinogram& s) {
    json h = {{"num_projections", s.num_projections()}, {"num_bins", s.num_bins()}, {"bin_spacing", s.bin_spacing()}};
    if (s.has_support_radius()) h["support_radius"] = s.support_radius();
    if (s.angles()) h["angles"] = *s.angles();
    detail::write_json(header, h);
    detail::write_f64le(payload_path(header), s.data());
}

inline Sinogram read_sinogram(const fs::path& header) {
    const json h = detail::read_json(header);
    const auto n = detail::field<long long>(h, "num_projections", header);
    const auto b = detail::field<long long>(h, "num_bins", header);
    const auto dr = detail::field<double>(h, "bin_spacing", header);
    if (n <= 0 || b < 2) throw FormatError(header.string() + ": invalid sinogram dimensions");
    if (!(dr > 0.0) || !std::isfinite(dr)) throw FormatError(header.string() + ": bin_spacing must be positive");
    auto data = detail::read_f64le(payload_path(header), static_cast<std::size_t>(n * b));
    Sinogram s(static_cast<std::size_t>(n), static_cast<std::size_t>(b), dr, std::move(data));
    try {
        if (h.contains("support_radius")) s.set_support_radius(h["support_radius"].get<double>());
        if (h.contains("angles")) s.set_angles(h["angles"].get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw FormatError(header.string() + ": " + e.what());
    } catch (const InvalidArgument& e) {
        throw FormatError(header.string() + ": " + e.what());
    }
    return s;
}

/// A CSV table held as text cells; numeric cells are formatted by the caller.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

/// Shortest round-trippable text for a double.
inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write_results_csv(const fs::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(table.columns);
    for (const auto& r : table.rows) {
        if (r.size() != table.columns.size()) throw FormatError("CSV row width does not match header");
        line(r);
    }
}

inline CsvTable read_results_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty CSV");
    t.columns = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != t.columns.size()) throw FormatError(path.string() + ": ragged CSV row");
        t.rows.push_back(std::move(cells));
    }
    return t;
}

} // namespace uvtomo::io
