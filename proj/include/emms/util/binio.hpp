#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "emms/util/error.hpp"

namespace emms {

// Little-endian binary readers/writers. The toolkit only targets
// little-endian hosts; file formats are defined little-endian.

template <typename T>
void write_pod(std::ostream& os, const T& v)
{
    static_assert(std::is_trivially_copyable_v<T>);
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::istream& is)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is)
        throw InvalidArgument("unexpected end of file");
    return v;
}

template <typename T>
void write_vec(std::ostream& os, const std::vector<T>& v)
{
    static_assert(std::is_trivially_copyable_v<T>);
    write_pod<std::uint64_t>(os, v.size());
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
std::vector<T> read_vec(std::istream& is)
{
    auto n = read_pod<std::uint64_t>(is);
    std::vector<T> v(n);
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(T)));
    if (!is)
        throw InvalidArgument("unexpected end of file");
    return v;
}

inline void write_str(std::ostream& os, const std::string& s)
{
    write_pod<std::uint64_t>(os, s.size());
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_str(std::istream& is)
{
    auto n = read_pod<std::uint64_t>(is);
    std::string s(n, '\0');
    is.read(s.data(), static_cast<std::streamsize>(n));
    if (!is)
        throw InvalidArgument("unexpected end of file");
    return s;
}

} // namespace emms
