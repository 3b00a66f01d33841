#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace strainsis {

/// Shortest-exact decimal form is not stable across libc implementations;
/// all CSV floats go through this fixed 17-significant-digit format so
/// reruns are byte-identical.
std::string format17(double x);

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, std::span<const std::string> header);

    void row(std::span<const double> values);

  private:
    std::ofstream out_;
};

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace strainsis
