#include "ordsim/text_format.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "ordsim/errors.hpp"

namespace ordsim {

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string format_double17(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                   std::chars_format::general, 17);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text, std::string_view what) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw DataError("expected a number for " + std::string(what) + ", got '" +
                        std::string(text) + "'");
    }
    return value;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw DataError("expected an integer for " + std::string(what) + ", got '" +
                        std::string(text) + "'");
    }
    return value;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    std::uint64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw DataError("expected an unsigned integer for " + std::string(what) +
                        ", got '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

AtomicFile::AtomicFile(const std::filesystem::path& target)
    : target_(target), temp_(target) {
    temp_ += ".tmp";
}

AtomicFile::~AtomicFile() {
    if (!committed_) {
        std::error_code ec;
        std::filesystem::remove(temp_, ec);
    }
}

void AtomicFile::write(std::string_view text) {
    buffer_.append(text);
}

void AtomicFile::commit() {
    {
        std::ofstream out(temp_, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open '" + temp_.string() + "' for writing");
        out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
        if (!out) throw DataError("write failed for '" + temp_.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(temp_, target_, ec);
    if (ec) throw DataError("cannot move '" + temp_.string() + "' to '" + target_.string() +
                            "': " + ec.message());
    committed_ = true;
}

}  // namespace ordsim
