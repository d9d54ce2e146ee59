#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace emms {

// Incremental FNV-1a over raw bytes; used for cache keys and data hashes.
class Hasher {
public:
    void update(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
    }

    template <typename T>
    void update_value(const T& v)
    {
        static_assert(std::is_trivially_copyable_v<T>);
        update(&v, sizeof(v));
    }

    void update_string(const std::string& s)
    {
        update_value<std::uint64_t>(s.size());
        update(s.data(), s.size());
    }

    std::uint64_t digest() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hex64(std::uint64_t v);

} // namespace emms
