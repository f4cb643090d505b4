/**
 * @file matrix_io.hpp
 * @brief Matrix file formats: CSV and the little-endian "FOCM" binary block.
 *
 * FOCM layout: magic "FOCM", u32 version (= 1), u64 rows, u64 cols, then
 * rows*cols IEEE-754 doubles in row-major order, all little-endian.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "focus/errors.hpp"
#include "focus/set_collection.hpp"

namespace focus::io {

inline constexpr std::array<char, 4> kFocmMagic{'F', 'O', 'C', 'M'};
inline constexpr std::uint32_t kFocmVersion = 1;

enum class MatrixFormat { Csv, Focm };

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(T)))
        throw FormatError("FOCM: unexpected end of data");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

/// Locale-independent parse of a full field; throws FormatError otherwise.
inline double parse_double(std::string_view field) {
    field = detail::trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw FormatError("not a number: '" + std::string(field) + "'");
    return v;
}

/// One point per line, comma separated. Blank lines and '#' comments are skipped.
inline Eigen::MatrixXd read_csv(std::istream& in) {
    std::vector<double> values;
    Eigen::Index cols = -1;
    Eigen::Index rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = detail::trim(line);
        if (view.empty() || view.front() == '#') continue;
        Eigen::Index count = 0;
        while (true) {
            auto comma = view.find(',');
            auto field = view.substr(0, comma);
            try {
                values.push_back(parse_double(field));
            } catch (const FormatError& e) {
                throw FormatError("CSV line " + std::to_string(line_no) + ": " + e.what());
            }
            ++count;
            if (comma == std::string_view::npos) break;
            view.remove_prefix(comma + 1);
        }
        if (cols < 0) cols = count;
        if (count != cols)
            throw FormatError("CSV line " + std::to_string(line_no) + " has " +
                              std::to_string(count) + " fields, expected " + std::to_string(cols));
        ++rows;
    }
    if (rows == 0) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = values[static_cast<std::size_t>(r * cols + c)];
    return out;
}

inline void write_csv(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
}

inline void write_focm(std::ostream& out, const Eigen::MatrixXd& m) {
    out.write(kFocmMagic.data(), kFocmMagic.size());
    detail::put_le<std::uint32_t>(out, kFocmVersion);
    detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) detail::put_le<double>(out, m(r, c));
}

inline Eigen::MatrixXd read_focm(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4 || magic != kFocmMagic) throw FormatError("FOCM: bad magic");
    const auto version = detail::get_le<std::uint32_t>(in);
    if (version != kFocmVersion)
        throw FormatError("FOCM: unsupported version " + std::to_string(version));
    const auto rows = detail::get_le<std::uint64_t>(in);
    const auto cols = detail::get_le<std::uint64_t>(in);
    constexpr std::uint64_t kLimit = std::uint64_t{1} << 40;
    if (rows > kLimit || cols > kLimit || (cols != 0 && rows > kLimit / cols))
        throw FormatError("FOCM: implausible shape");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = detail::get_le<double>(in);
    return m;
}

inline MatrixFormat format_for_path(const std::filesystem::path& path) {
    return path.extension() == ".focm" ? MatrixFormat::Focm : MatrixFormat::Csv;
}

inline Eigen::MatrixXd read_matrix(std::istream& in, MatrixFormat format) {
    return format == MatrixFormat::Focm ? read_focm(in) : read_csv(in);
}

inline Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return read_matrix(in, format_for_path(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

inline void write_matrix(std::ostream& out, const Eigen::MatrixXd& m, MatrixFormat format) {
    if (format == MatrixFormat::Focm)
        write_focm(out, m);
    else
        write_csv(out, m);
}

/// Writes through a sibling temp file and renames it into place.
inline void write_atomic(const std::filesystem::path& path,
                         const std::function<void(std::ostream&)>& body) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        body(out);
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename into " + path.string());
    }
}

inline void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    write_atomic(path, [&](std::ostream& out) { write_matrix(out, m, format_for_path(path)); });
}

inline bool is_matrix_file(const std::filesystem::path& p) {
    return p.extension() == ".csv" || p.extension() == ".focm";
}

/// Loads every .csv/.focm file in `dir` as one set, ordered by filename.
inline SetCollection read_set_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && is_matrix_file(entry.path())) files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    if (files.empty()) throw IoError("no matrix files in " + dir.string());
    SetCollection collection;
    for (const auto& f : files) collection.sets.push_back(read_matrix(f));
    collection.validate();
    return collection;
}

/// Writes set_000.<ext>, set_001.<ext>, ... into `dir` (created if missing).
inline void write_set_directory(const std::filesystem::path& dir, const SetCollection& collection,
                                MatrixFormat format = MatrixFormat::Csv) {
    std::filesystem::create_directories(dir);
    const char* ext = format == MatrixFormat::Focm ? ".focm" : ".csv";
    for (std::size_t m = 0; m < collection.size(); ++m) {
        std::ostringstream name;
        name << "set_";
        name.width(4);
        name.fill('0');
        name << m << ext;
        write_matrix(dir / name.str(), collection.sets[m]);
    }
}

/// "index,value" rows with a header line; used for scores and labels.
inline void write_indexed_column(std::ostream& out, std::string_view header,
                                 const Eigen::VectorXd& values, bool integral = false) {
    out << "index," << header << '\n';
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        out << i << ',';
        if (integral)
            out << static_cast<long long>(values[i]);
        else
            out << format_double(values[i]);
        out << '\n';
    }
}

/// Reads "index,value" CSV (header optional); rows must be in index order.
inline Eigen::VectorXd read_indexed_column(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = detail::trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto comma = view.find(',');
        if (comma == std::string_view::npos)
            throw FormatError("line " + std::to_string(line_no) + ": expected index,value");
        auto idx_field = detail::trim(view.substr(0, comma));
        if (line_no == 1 && idx_field == "index") continue;
        const double idx = parse_double(idx_field);
        if (idx != static_cast<double>(values.size()))
            throw FormatError("line " + std::to_string(line_no) + ": index out of order");
        values.push_back(parse_double(view.substr(comma + 1)));
    }
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline Eigen::VectorXd read_indexed_column(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_indexed_column(in);
}

}  // namespace focus::io
