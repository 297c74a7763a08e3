#pragma once

// Little-endian primitive readers/writers shared by the CSR and vector containers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "supertomo/error.hpp"

namespace supertomo::detail {

inline std::uint64_t to_little(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
        return r;
    }
    return v;
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
    const std::uint64_t le = to_little(v);
    os.write(reinterpret_cast<const char*>(&le), sizeof le);
}

inline void write_f64(std::ostream& os, double v) { write_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t read_u64(std::istream& is, std::string_view what) {
    std::uint64_t le = 0;
    if (!is.read(reinterpret_cast<char*>(&le), sizeof le)) {
        throw Error("truncated file while reading " + std::string(what));
    }
    return to_little(le);
}

inline double read_f64(std::istream& is, std::string_view what) { return std::bit_cast<double>(read_u64(is, what)); }

inline void write_magic(std::ostream& os, std::string_view magic) { os.write(magic.data(), static_cast<std::streamsize>(magic.size())); }

inline void expect_magic(std::istream& is, std::string_view magic) {
    std::string buf(magic.size(), '\0');
    if (!is.read(buf.data(), static_cast<std::streamsize>(buf.size())) || buf != magic) {
        throw Error("bad magic: expected " + std::string(magic));
    }
}

}  // namespace supertomo::detail
