#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace routechoice {

std::string read_text_file(const std::filesystem::path& path);

// Writes via a sibling temp file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Buffers outputs so that a failing command leaves nothing behind: nothing
// touches the filesystem until commit().
class OutputSet {
public:
    void add(std::filesystem::path path, std::string content);
    void commit() const;
    const std::vector<std::pair<std::filesystem::path, std::string>>& files() const { return files_; }

private:
    std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Fixed-precision decimal for CSV columns.
std::string format_fixed(double v, int digits = 6);

// Splits one CSV line on commas (no quoting; the formats here never need it).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace routechoice
