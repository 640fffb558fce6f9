#include "mmgeo/embedding_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace mmgeo {

static_assert(std::endian::native == std::endian::little, "MMEB IO assumes a little-endian host");

std::string to_string(IoErrorCode code) {
    switch (code) {
    case IoErrorCode::open_failed: return "open_failed";
    case IoErrorCode::bad_magic: return "bad_magic";
    case IoErrorCode::bad_version: return "bad_version";
    case IoErrorCode::bad_dtype: return "bad_dtype";
    case IoErrorCode::truncated_header: return "truncated_header";
    case IoErrorCode::truncated_payload: return "truncated_payload";
    case IoErrorCode::trailing_bytes: return "trailing_bytes";
    case IoErrorCode::non_finite: return "non_finite";
    case IoErrorCode::ragged_csv: return "ragged_csv";
    case IoErrorCode::parse_error: return "parse_error";
    case IoErrorCode::empty_input: return "empty_input";
    case IoErrorCode::write_failed: return "write_failed";
    }
    return "unknown";
}

EmbeddingFormat parse_format(const std::string& name) {
    if (name == "mmeb") return EmbeddingFormat::mmeb;
    if (name == "csv") return EmbeddingFormat::csv;
    throw std::invalid_argument("unknown embedding format '" + name + "' (expected mmeb or csv)");
}

namespace {

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoErrorCode::open_failed, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename T>
T load(const std::string& bytes, std::size_t offset) {
    T v;
    std::memcpy(&v, bytes.data() + offset, sizeof(T));
    return v;
}

template <typename T>
void store(std::string& bytes, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    bytes.append(buf, sizeof(T));
}

std::string cell_position(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", col " + std::to_string(col);
}

EmbeddingMatrix decode_mmeb(const std::string& bytes) {
    if (bytes.size() < kMmebHeaderBytes)
        throw IoError(IoErrorCode::truncated_header, "header needs " + std::to_string(kMmebHeaderBytes) +
                                                         " bytes, file has " + std::to_string(bytes.size()));
    if (bytes.compare(0, 4, "MMEB") != 0) throw IoError(IoErrorCode::bad_magic, "missing MMEB magic");
    const auto version = load<std::uint32_t>(bytes, 4);
    if (version != kMmebVersion)
        throw IoError(IoErrorCode::bad_version, "unsupported version " + std::to_string(version));
    const auto rows = load<std::uint64_t>(bytes, 8);
    const auto cols = load<std::uint64_t>(bytes, 16);
    const auto dtype = load<std::uint32_t>(bytes, 24);
    if (dtype != kMmebFloat32) throw IoError(IoErrorCode::bad_dtype, "unsupported dtype tag " + std::to_string(dtype));
    if (rows == 0 || cols == 0) throw IoError(IoErrorCode::empty_input, "matrix has no entries");

    const std::uint64_t expected = rows * cols * 4;
    const std::uint64_t actual = bytes.size() - kMmebHeaderBytes;
    if (actual < expected)
        throw IoError(IoErrorCode::truncated_payload, "expected " + std::to_string(expected) +
                                                          " payload bytes, found " + std::to_string(actual));
    if (actual > expected)
        throw IoError(IoErrorCode::trailing_bytes, "expected " + std::to_string(expected) +
                                                       " payload bytes, found " + std::to_string(actual));

    EmbeddingMatrix out{Matrix(rows, cols), false};
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const float v = load<float>(bytes, kMmebHeaderBytes + 4 * (i * cols + j));
            if (!std::isfinite(v)) throw IoError(IoErrorCode::non_finite, cell_position(i, j));
            out.values(i, j) = v;
        }
    return out;
}

bool parse_cells(const std::string& line, std::vector<double>& cells, std::size_t& bad_col) {
    cells.clear();
    std::size_t start = 0;
    while (true) {
        const std::size_t end = line.find(',', start);
        std::string_view cell(line.data() + start, (end == std::string::npos ? line.size() : end) - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
            cell.remove_suffix(1);
        if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
            bad_col = cells.size();
            return false;
        }
        cells.push_back(v);
        if (end == std::string::npos) return true;
        start = end + 1;
    }
}

EmbeddingMatrix decode_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::vector<double> values, cells;
    std::size_t cols = 0, rows = 0, line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::size_t bad_col = 0;
        if (!parse_cells(line, cells, bad_col)) {
            if (rows == 0 && line_no == 1) continue; // header
            throw IoError(IoErrorCode::parse_error, "line " + std::to_string(line_no) + ", col " +
                                                        std::to_string(bad_col) + " is not a number");
        }
        if (rows == 0) cols = cells.size();
        if (cells.size() != cols)
            throw IoError(IoErrorCode::ragged_csv, "line " + std::to_string(line_no) + " has " +
                                                       std::to_string(cells.size()) + " fields, expected " +
                                                       std::to_string(cols));
        for (std::size_t j = 0; j < cells.size(); ++j)
            if (!std::isfinite(cells[j])) throw IoError(IoErrorCode::non_finite, cell_position(rows, j));
        values.insert(values.end(), cells.begin(), cells.end());
        ++rows;
    }
    if (rows == 0) throw IoError(IoErrorCode::empty_input, "no data rows in " + source);
    return {Matrix(rows, cols, std::move(values)), false};
}

} // namespace

EmbeddingMatrix decode(const std::string& bytes, EmbeddingFormat format, const std::string& source) {
    return format == EmbeddingFormat::mmeb ? decode_mmeb(bytes) : decode_csv(bytes, source);
}

EmbeddingMatrix ingest(const std::filesystem::path& path, EmbeddingFormat format) {
    return decode(read_all(path), format, path.string());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(IoErrorCode::write_failed, "cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError(IoErrorCode::write_failed, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError(IoErrorCode::write_failed, "cannot rename into " + path.string());
    }
}

std::string encode(const Matrix& m, EmbeddingFormat format) {
    require(m.rows() >= 1 && m.cols() >= 1, "cannot export an empty matrix");
    std::string bytes;
    if (format == EmbeddingFormat::mmeb) {
        bytes.reserve(kMmebHeaderBytes + 4 * m.rows() * m.cols());
        bytes.append("MMEB", 4);
        store<std::uint32_t>(bytes, kMmebVersion);
        store<std::uint64_t>(bytes, m.rows());
        store<std::uint64_t>(bytes, m.cols());
        store<std::uint32_t>(bytes, kMmebFloat32);
        for (double v : m.values()) store<float>(bytes, static_cast<float>(v));
    } else {
        char buf[32];
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (j) bytes.push_back(',');
                const auto res = std::to_chars(buf, buf + sizeof buf, m(i, j), std::chars_format::general, 17);
                bytes.append(buf, res.ptr);
            }
            bytes.push_back('\n');
        }
    }
    return bytes;
}

void export_embeddings(const Matrix& m, const std::filesystem::path& path, EmbeddingFormat format) {
    write_file_atomic(path, encode(m, format));
}

} // namespace mmgeo
