#pragma once

// Little-endian binary IO shared by the checkpoint and dataset formats.
// Errors carry byte offsets.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "symreg/errors.hpp"

namespace symreg::binio {

inline void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_f32(std::ostream& os, float v) {
    const std::uint32_t u = std::bit_cast<std::uint32_t>(v);
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_f64(std::ostream& os, double v) {
    const std::uint64_t u = std::bit_cast<std::uint64_t>(v);
    put_u64(os, u);
}

class Reader {
  public:
    Reader(std::istream& is, std::string what) : is_(is), what_(std::move(what)) {}

    std::uint64_t offset() const { return offset_; }

    void bytes(void* dst, std::size_t n, const char* field) {
        is_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is_.gcount()) != n)
            throw FormatError(what_ + ": truncated while reading " + std::string(field) +
                              " at byte offset " + std::to_string(offset_));
        offset_ += n;
    }

    std::uint64_t u64(const char* field) {
        unsigned char b[8];
        bytes(b, 8, field);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }

    float f32(const char* field) {
        unsigned char b[4];
        bytes(b, 4, field);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return std::bit_cast<float>(v);
    }

    double f64(const char* field) { return std::bit_cast<double>(u64(field)); }

    void expect_magic(const char* magic8) {
        char got[9] = {0};
        bytes(got, 8, "magic");
        if (std::memcmp(got, magic8, 8) != 0)
            throw FormatError(what_ + ": bad magic at byte offset 0, expected \"" +
                              std::string(magic8) + "\", got \"" + std::string(got, 8) + "\"");
    }

    void expect_eof() {
        char c;
        is_.read(&c, 1);
        if (!is_.eof())
            throw FormatError(what_ + ": trailing bytes at offset " + std::to_string(offset_));
    }

  private:
    std::istream& is_;
    std::string what_;
    std::uint64_t offset_ = 0;
};

}  // namespace symreg::binio
