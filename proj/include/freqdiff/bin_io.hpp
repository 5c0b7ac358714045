#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqdiff {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts unsupported");

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return f;
}

inline void write_u32(std::ostream& o, std::uint32_t v) {
    o.write(reinterpret_cast<const char*>(&v), 4);
}

inline void write_u64(std::ostream& o, std::uint64_t v) {
    o.write(reinterpret_cast<const char*>(&v), 8);
}

inline std::uint32_t read_u32(std::istream& i, const char* what = "u32") {
    std::uint32_t v = 0;
    i.read(reinterpret_cast<char*>(&v), 4);
    if (!i) throw std::runtime_error(std::string("truncated file while reading ") + what);
    return v;
}

inline std::uint64_t read_u64(std::istream& i, const char* what = "u64") {
    std::uint64_t v = 0;
    i.read(reinterpret_cast<char*>(&v), 8);
    if (!i) throw std::runtime_error(std::string("truncated file while reading ") + what);
    return v;
}

// IDX headers are big-endian.
inline std::uint32_t read_u32_be(std::istream& i, const char* what = "u32") {
    unsigned char b[4];
    i.read(reinterpret_cast<char*>(b), 4);
    if (!i) throw std::runtime_error(std::string("truncated file while reading ") + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
           std::uint32_t(b[3]);
}

inline void write_u32_be(std::ostream& o, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    o.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_f32s(std::ostream& o, const std::vector<float>& v) {
    o.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 4));
}

inline std::vector<float> read_f32s(std::istream& i, std::size_t n, const char* what = "floats") {
    std::vector<float> v(n);
    i.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * 4));
    if (!i) throw std::runtime_error(std::string("truncated file while reading ") + what);
    return v;
}

inline void write_f32s(std::ostream& o, const float* p, std::size_t n) {
    o.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * 4));
}

inline void read_f32s(std::istream& i, float* p, std::size_t n, const char* what = "floats") {
    i.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * 4));
    if (!i) throw std::runtime_error(std::string("truncated file while reading ") + what);
}

inline void write_str(std::ostream& o, const std::string& s) {
    write_u32(o, static_cast<std::uint32_t>(s.size()));
    o.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_str(std::istream& i, const char* what = "string") {
    std::uint32_t n = read_u32(i, what);
    std::string s(n, '\0');
    i.read(s.data(), n);
    if (!i) throw std::runtime_error(std::string("truncated file while reading ") + what);
    return s;
}

inline void expect_magic(std::istream& i, const char* magic, const char* format_name) {
    char got[4];
    i.read(got, 4);
    if (!i || std::string(got, 4) != std::string(magic, 4))
        throw std::runtime_error(std::string("bad magic, not a ") + format_name + " file");
}

}  // namespace freqdiff
