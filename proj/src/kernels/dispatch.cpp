#include "emms/kernels/kernels.hpp"

#include <cstdlib>

#include "emms/util/error.hpp"

namespace emms::kernels {

#ifndef EMMS_BUILT_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2()
{
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* pick_auto()
{
    if (cpu_has_avx2() && avx2_table())
        return avx2_table();
    return &scalar_table();
}

const KernelTable* pick_initial()
{
    if (const char* env = std::getenv("EMMS_KERNELS")) {
        const std::string s = env;
        if (s == "scalar")
            return &scalar_table();
        if (s == "avx2" && avx2_table() && cpu_has_avx2())
            return avx2_table();
    }
    return pick_auto();
}

const KernelTable*& current()
{
    static const KernelTable* t = pick_initial();
    return t;
}

} // namespace

const KernelTable& active() { return *current(); }

void force_backend(const std::string& name)
{
    if (name == "auto") {
        current() = pick_auto();
    } else if (name == "scalar") {
        current() = &scalar_table();
    } else if (name == "avx2") {
        if (!avx2_table() || !cpu_has_avx2())
            throw InvalidArgument("AVX2 kernels unavailable on this host/build");
        current() = avx2_table();
    } else {
        throw InvalidArgument("unknown kernel backend: " + name);
    }
}

} // namespace emms::kernels
