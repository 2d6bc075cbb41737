#include "strainmodal/record_io.hpp"

#include "strainmodal/errors.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace strainmodal {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'M', 'R', '1'};

double parse_double(std::string_view token, const std::string& where) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError(where + ": cannot parse number from '" + std::string(token) + "'");
    }
    return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view field = comma == std::string_view::npos
                                     ? line.substr(start)
                                     : line.substr(start, comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
            field.remove_prefix(1);
        }
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' ||
                                  field.back() == '\r')) {
            field.remove_suffix(1);
        }
        fields.push_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

Record load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    std::string_view header(line);
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    if (!header.starts_with("fs=")) {
        throw ParseError(path.string() + ": first row must be fs=<value>");
    }
    const double fs = parse_double(header.substr(3), path.string() + ":1");

    if (!std::getline(in, line)) {
        throw ParseError(path.string() + ": missing positions row");
    }
    const std::vector<std::string_view> pos_fields = split_csv(line);
    const Eigen::Index channels = Eigen::Index(pos_fields.size());
    std::vector<double> positions(pos_fields.size());
    for (std::size_t c = 0; c < pos_fields.size(); ++c) {
        positions[c] = parse_double(pos_fields[c], path.string() + ":2");
    }

    std::vector<double> data;
    Eigen::Index samples = 0;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string_view> fields = split_csv(line);
        if (Eigen::Index(fields.size()) != channels) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(channels) + " fields, got " +
                             std::to_string(fields.size()));
        }
        for (std::string_view f : fields) {
            data.push_back(parse_double(f, path.string() + ":" + std::to_string(line_no)));
        }
        ++samples;
    }
    if (samples == 0) throw ParseError(path.string() + ": no sample rows");

    // CSV rows are time steps; samples are stored channels x time.
    Eigen::MatrixXd mat(channels, samples);
    for (Eigen::Index t = 0; t < samples; ++t) {
        for (Eigen::Index c = 0; c < channels; ++c) {
            mat(c, t) = data[std::size_t(t * channels + c)];
        }
    }
    return Record(std::move(mat), fs, std::move(positions));
}

void save_csv(const Record& record, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out.precision(std::numeric_limits<double>::max_digits10);
    out << "fs=" << record.sampling_rate_hz() << '\n';
    for (Eigen::Index c = 0; c < record.channel_count(); ++c) {
        if (c > 0) out << ',';
        out << record.channel_positions_m()[std::size_t(c)];
    }
    out << '\n';
    for (Eigen::Index t = 0; t < record.sample_count(); ++t) {
        for (Eigen::Index c = 0; c < record.channel_count(); ++c) {
            if (c > 0) out << ',';
            out << record.samples()(c, t);
        }
        out << '\n';
    }
    if (!out) throw ValidationError("write failed for " + path.string());
}

template <typename T>
T read_le(std::istream& in, const std::string& where) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
        throw ParseError(where + ": truncated file");
    }
    if constexpr (sizeof(T) == 4) {
        const std::uint32_t raw = std::uint32_t(bytes[0]) | std::uint32_t(bytes[1]) << 8 |
                                  std::uint32_t(bytes[2]) << 16 | std::uint32_t(bytes[3]) << 24;
        T value;
        std::memcpy(&value, &raw, sizeof(T));
        return value;
    } else {
        std::uint64_t raw = 0;
        for (int k = 7; k >= 0; --k) raw = raw << 8 | bytes[std::size_t(k)];
        T value;
        std::memcpy(&value, &raw, sizeof(T));
        return value;
    }
}

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    std::array<unsigned char, sizeof(T)> bytes{};
    if constexpr (sizeof(T) == 4) {
        std::uint32_t raw;
        std::memcpy(&raw, &value, 4);
        for (int k = 0; k < 4; ++k) bytes[std::size_t(k)] = (raw >> (8 * k)) & 0xff;
    } else {
        std::uint64_t raw;
        std::memcpy(&raw, &value, 8);
        for (int k = 0; k < 8; ++k) bytes[std::size_t(k)] = (raw >> (8 * k)) & 0xff;
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

Record load_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());

    std::array<char, 4> magic{};
    if (!in.read(magic.data(), 4) || magic != kMagic) {
        throw ParseError(path.string() + ": bad magic, not a strain record file");
    }
    const auto channels = read_le<std::uint32_t>(in, path.string());
    const auto samples = read_le<std::uint32_t>(in, path.string());
    const double fs = read_le<double>(in, path.string());
    if (channels == 0 || samples == 0) {
        throw ParseError(path.string() + ": zero channel or sample count");
    }

    std::vector<double> positions(channels);
    for (std::uint32_t c = 0; c < channels; ++c) {
        positions[c] = read_le<double>(in, path.string());
    }
    Eigen::MatrixXd mat(channels, samples);
    for (std::uint32_t c = 0; c < channels; ++c) {
        for (std::uint32_t t = 0; t < samples; ++t) {
            mat(c, t) = read_le<double>(in, path.string());
        }
    }
    return Record(std::move(mat), fs, std::move(positions));
}

void save_binary(const Record& record, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out.write(kMagic.data(), 4);
    write_le(out, std::uint32_t(record.channel_count()));
    write_le(out, std::uint32_t(record.sample_count()));
    write_le(out, record.sampling_rate_hz());
    for (Eigen::Index c = 0; c < record.channel_count(); ++c) {
        write_le(out, record.channel_positions_m()[std::size_t(c)]);
    }
    for (Eigen::Index c = 0; c < record.channel_count(); ++c) {
        for (Eigen::Index t = 0; t < record.sample_count(); ++t) {
            write_le(out, record.samples()(c, t));
        }
    }
    if (!out) throw ValidationError("write failed for " + path.string());
}

// Central differences inside, one-sided at the ends, all scaled by fs.
Eigen::MatrixXd differentiate_samples(const Eigen::MatrixXd& x, double fs) {
    const Eigen::Index n = x.cols();
    Eigen::MatrixXd d(x.rows(), n);
    if (n == 1) {
        d.setZero();
        return d;
    }
    d.col(0) = (x.col(1) - x.col(0)) * fs;
    d.col(n - 1) = (x.col(n - 1) - x.col(n - 2)) * fs;
    for (Eigen::Index t = 1; t + 1 < n; ++t) {
        d.col(t) = (x.col(t + 1) - x.col(t - 1)) * (0.5 * fs);
    }
    return d;
}

} // namespace

Record load_record(const std::filesystem::path& path, RecordFormat format,
                   const LoadOptions& options) {
    Record record = format == RecordFormat::csv ? load_csv(path) : load_binary(path);
    if (options.differentiate) {
        Eigen::MatrixXd d =
            differentiate_samples(record.samples(), record.sampling_rate_hz());
        record = record.with_samples(std::move(d));
    }
    return record;
}

void save_record(const Record& record, const std::filesystem::path& path,
                 RecordFormat format) {
    if (format == RecordFormat::csv) {
        save_csv(record, path);
    } else {
        save_binary(record, path);
    }
}

} // namespace strainmodal
