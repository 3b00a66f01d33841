#include "strainsis/io.hpp"

#include <cstdio>

#include "strainsis/errors.hpp"

namespace strainsis {

std::string format17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::span<const std::string> header) {
    out_.open(path);
    if (!out_) throw validation_error("cannot open output file " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << format17(values[i]);
    }
    out_ << '\n';
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot open output file " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace strainsis
