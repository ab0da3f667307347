#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ordsim {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

// Fixed 17-significant-digit form used where files must diff bit-exactly.
std::string format_double17(double value);

// Strict full-token numeric parsers. `what` names the value in error messages.
double parse_double(std::string_view text, std::string_view what = "value");
std::int64_t parse_int(std::string_view text, std::string_view what = "integer");
std::uint64_t parse_u64(std::string_view text, std::string_view what = "seed");

std::vector<std::string_view> split_whitespace(std::string_view line);
std::string to_lower(std::string_view text);

// Writes a file through a temporary sibling and renames it into place on
// commit, so a failed command never leaves a partial artifact behind.
class AtomicFile {
public:
    explicit AtomicFile(const std::filesystem::path& target);
    ~AtomicFile();

    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;

    void write(std::string_view text);
    void commit();

private:
    std::filesystem::path target_;
    std::filesystem::path temp_;
    std::string buffer_;
    bool committed_ = false;
};

}  // namespace ordsim
