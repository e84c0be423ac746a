#include "ecoc/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ecoc/error.hpp"

namespace ecoc {

namespace {

std::uint32_t read_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void write_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ProbabilityMatrix read_probability_blob(const std::filesystem::path& path) {
    const std::string data = slurp(path);
    if (data.size() < 8) throw ValidationError(path.string() + ": blob shorter than its 8-byte header");
    const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
    ProbabilityMatrix m;
    m.rows = read_u32_le(bytes);
    m.cols = read_u32_le(bytes + 4);
    const std::size_t expected = 8 + m.rows * m.cols * 4;
    if (data.size() != expected)
        throw ValidationError(path.string() + ": blob has " + std::to_string(data.size()) + " bytes, header implies " +
                              std::to_string(expected));
    m.values.resize(m.rows * m.cols);
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        const std::uint32_t u = read_u32_le(bytes + 8 + 4 * i);
        m.values[i] = static_cast<double>(std::bit_cast<float>(u));
    }
    return m;
}

void write_probability_blob(const std::filesystem::path& path, const ProbabilityMatrix& m) {
    if (m.values.size() != m.rows * m.cols) throw std::invalid_argument("probability matrix shape mismatch");
    std::string out;
    out.reserve(8 + 4 * m.values.size());
    write_u32_le(out, static_cast<std::uint32_t>(m.rows));
    write_u32_le(out, static_cast<std::uint32_t>(m.cols));
    for (double v : m.values) write_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    write_text(path, out);
}

ProbabilityMatrix read_probability_csv(const std::filesystem::path& path) {
    std::istringstream in(slurp(path));
    ProbabilityMatrix m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::size_t count = 0;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) {
            try {
                std::size_t used = 0;
                m.values.push_back(std::stod(tok, &used));
                while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": bad value '" + tok + "'");
            }
            ++count;
        }
        if (m.rows == 0) m.cols = count;
        if (count != m.cols)
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(m.cols) + " values, found " + std::to_string(count));
        ++m.rows;
    }
    return m;
}

ProbabilityMatrix read_probabilities(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? read_probability_csv(path) : read_probability_blob(path);
}

std::vector<std::size_t> read_class_ids(const std::filesystem::path& path) {
    std::istringstream in(slurp(path));
    std::vector<std::size_t> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::size_t v = 0;
        const auto* end = line.data() + line.size();
        const auto [ptr, ec] = std::from_chars(line.data(), end, v);
        if (ec != std::errc{} || ptr != end)
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": bad class id '" + line + "'");
        out.push_back(v);
    }
    return out;
}

std::string header_lines(const OutputHeader& h, const std::string& prefix) {
    std::string s;
    s += prefix + "tool: ecoc " ECOC_VERSION "\n";
    s += prefix + "command: " + h.command + "\n";
    s += prefix + "seeds:";
    for (auto seed : h.seeds) s += " " + std::to_string(seed);
    s += "\n";
    return s;
}

std::string pgm_string(std::span<const std::size_t> labels, std::size_t height, std::size_t width,
                       std::size_t n_classes, const OutputHeader& h) {
    if (labels.size() != height * width) throw std::invalid_argument("pgm: label count does not match grid");
    std::string s = "P2\n" + header_lines(h) + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    const std::size_t span = n_classes > 1 ? n_classes - 1 : 1;
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            if (c) s += ' ';
            s += std::to_string(labels[r * width + c] * 255 / span);
        }
        s += '\n';
    }
    return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
    if (!out) throw ValidationError("failed writing " + path.string());
}

std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

}  // namespace ecoc
