/**
 * @file model_io.hpp
 * @brief FocusModel persistence.
 *
 * Layout:
 *
 *     FOCUS-MODEL
 *     version: 1
 *     dim_in: <d>
 *     removed: <k>
 *     cutoff: <double>
 *     epsilon: <double>
 *     zero_tol: <double>
 *     ambiguous_remove_above: <double|none>
 *     meta.<key>: <value>          (zero or more)
 *     binary_bytes: <N>
 *     end
 *     <N bytes: FOCM(U) FOCM(V) FOCM(eigenvalues as d x 1)>
 *     <u32 little-endian CRC-32 of the N binary bytes>
 *
 * Doubles in the header use the shortest round-trip decimal form, so a
 * save/load cycle is exact.
 */

#pragma once

#include <boost/crc.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "focus/errors.hpp"
#include "focus/matrix_io.hpp"
#include "focus/projection.hpp"

namespace focus {

inline constexpr const char* kModelFormatName = "FOCUS-MODEL";
inline constexpr int kModelVersion = 1;

/// Free-form provenance carried next to the model (keys and values are single-line).
using ModelMetadata = std::map<std::string, std::string>;

struct StoredModel {
    FocusModel model;
    ModelMetadata metadata;
};

inline std::uint32_t crc32(std::string_view bytes) {
    boost::crc_32_type crc;
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

inline void save_model(std::ostream& out, const FocusModel& model, const ModelMetadata& metadata = {}) {
    std::ostringstream block;
    io::write_focm(block, model.removed_basis);
    io::write_focm(block, model.kept_basis);
    io::write_focm(block, Eigen::MatrixXd(model.eigenvalues));
    const std::string bytes = block.str();

    out << kModelFormatName << '\n';
    out << "version: " << kModelVersion << '\n';
    out << "dim_in: " << model.dim_in() << '\n';
    out << "removed: " << model.removed() << '\n';
    out << "cutoff: " << io::format_double(model.cutoff) << '\n';
    out << "epsilon: " << io::format_double(model.epsilon) << '\n';
    out << "zero_tol: " << io::format_double(model.zero_tol) << '\n';
    out << "ambiguous_remove_above: "
        << (model.ambiguous_remove_above ? io::format_double(*model.ambiguous_remove_above) : std::string("none")) << '\n';
    for (const auto& [key, value] : metadata) {
        if (key.find_first_of(":\n ") != std::string::npos || value.find('\n') != std::string::npos)
            throw ConfigError("metadata entries must be single-line and keys must not contain ':' or spaces");
        out << "meta." << key << ": " << value << '\n';
    }
    out << "binary_bytes: " << bytes.size() << '\n';
    out << "end\n";
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    io::detail::put_le<std::uint32_t>(out, crc32(bytes));
}

inline void save_model(const std::filesystem::path& path, const FocusModel& model, const ModelMetadata& metadata = {}) {
    io::write_atomic(path, [&](std::ostream& out) { save_model(out, model, metadata); });
}

inline StoredModel load_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kModelFormatName) throw ModelCorruptError("not a FOCUS-MODEL file");

    std::map<std::string, std::string> fields;
    ModelMetadata metadata;
    bool terminated = false;
    while (std::getline(in, line)) {
        if (line == "end") {
            terminated = true;
            break;
        }
        const auto colon = line.find(": ");
        if (colon == std::string::npos) throw ModelCorruptError("malformed header line: " + line);
        auto key = line.substr(0, colon);
        auto value = line.substr(colon + 2);
        if (key.rfind("meta.", 0) == 0)
            metadata[key.substr(5)] = value;
        else
            fields[key] = value;
    }
    if (!terminated) throw ModelCorruptError("header is not terminated");

    auto field = [&](const std::string& key) -> const std::string& {
        auto it = fields.find(key);
        if (it == fields.end()) throw ModelCorruptError("header is missing '" + key + "'");
        return it->second;
    };
    auto number = [&](const std::string& key) {
        try {
            return io::parse_double(field(key));
        } catch (const FormatError&) {
            throw ModelCorruptError("header field '" + key + "' is not numeric");
        }
    };

    if (number("version") != kModelVersion)
        throw ModelVersionError("model version " + field("version") + " is not supported (expected " +
                                std::to_string(kModelVersion) + ")");

    const double byte_count = number("binary_bytes");
    if (byte_count < 0 || byte_count > 1e12) throw ModelCorruptError("implausible binary size");
    std::string bytes(static_cast<std::size_t>(byte_count), '\0');
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw ModelCorruptError("binary block is truncated");
    std::uint32_t stored_crc = 0;
    try {
        stored_crc = io::detail::get_le<std::uint32_t>(in);
    } catch (const FormatError&) {
        throw ModelCorruptError("checksum is missing");
    }
    if (stored_crc != crc32(bytes)) throw ModelCorruptError("checksum mismatch");

    StoredModel stored;
    auto& model = stored.model;
    try {
        std::istringstream block(bytes);
        model.removed_basis = io::read_focm(block);
        model.kept_basis = io::read_focm(block);
        const Eigen::MatrixXd eig = io::read_focm(block);
        if (eig.cols() != 1) throw ModelCorruptError("eigenvalue block must be a column");
        model.eigenvalues = eig.col(0);
    } catch (const FormatError& e) {
        throw ModelCorruptError(std::string("binary block: ") + e.what());
    }
    model.cutoff = number("cutoff");
    model.epsilon = number("epsilon");
    model.zero_tol = number("zero_tol");
    if (field("ambiguous_remove_above") != "none") model.ambiguous_remove_above = number("ambiguous_remove_above");

    const auto d = static_cast<Eigen::Index>(number("dim_in"));
    const auto k = static_cast<Eigen::Index>(number("removed"));
    if (model.removed_basis.rows() != d || model.removed_basis.cols() != k || model.kept_basis.rows() != d ||
        model.kept_basis.cols() != d - k || model.eigenvalues.size() != d)
        throw ModelCorruptError("matrix shapes disagree with header");
    stored.metadata = std::move(metadata);
    return stored;
}

inline StoredModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return load_model(in);
}

}  // namespace focus
