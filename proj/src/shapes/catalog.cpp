#include "emms/shapes/primitives.hpp"

namespace emms::shapes {

std::string family_name(Family f)
{
    switch (f) {
    case Family::JC: return "JC";
    case Family::RP: return "RP";
    case Family::CS: return "CS";
    case Family::CR: return "CR";
    case Family::CompJC: return "compJC";
    case Family::CompRP: return "compRP";
    }
    throw InvalidArgument("bad family");
}

Family family_from_name(const std::string& name)
{
    if (name == "JC") return Family::JC;
    if (name == "RP") return Family::RP;
    if (name == "CS") return Family::CS;
    if (name == "CR") return Family::CR;
    if (name == "compJC") return Family::CompJC;
    if (name == "compRP") return Family::CompRP;
    throw InvalidArgument("unknown primitive family: " + name);
}

std::vector<PrimitiveSpec> enumerate_catalog(Family family)
{
    std::vector<PrimitiveSpec> out;
    switch (family) {
    case Family::JC:
    case Family::CompJC:
        // l_{JC,x/y} in [2.2 : 0.2 : 4.0], 10 x 10 values.
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                PrimitiveSpec s;
                s.family = family;
                s.l_x = 2.2 + 0.2 * i;
                s.l_y = 2.2 + 0.2 * j;
                out.push_back(s);
            }
        break;
    case Family::RP:
    case Family::CompRP:
        // l_{P,x/y} in [2.0 : 0.2 : 5.0], 16 x 16 values.
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
                PrimitiveSpec s;
                s.family = family;
                s.l_x = 2.0 + 0.2 * i;
                s.l_y = 2.0 + 0.2 * j;
                out.push_back(s);
            }
        break;
    case Family::CS:
        // r_CS in [1.0 : 0.1 : 2.6], 17 values.
        for (int i = 0; i < 17; ++i) {
            PrimitiveSpec s;
            s.family = family;
            s.r = 1.0 + 0.1 * i;
            out.push_back(s);
        }
        break;
    case Family::CR:
        // r_CR in [1.4 : 0.2 : 2.6] x w_CR in [0.1 : 0.2 : 1.3], 7 x 7.
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 7; ++j) {
                PrimitiveSpec s;
                s.family = family;
                s.r = 1.4 + 0.2 * i;
                s.w = 0.1 + 0.2 * j;
                out.push_back(s);
            }
        break;
    }
    return out;
}

namespace {
std::vector<PrimitiveSpec> concat(std::vector<PrimitiveSpec> a,
                                  const std::vector<PrimitiveSpec>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}
} // namespace

std::vector<PrimitiveSpec> catalog_outer()
{
    auto out = enumerate_catalog(Family::JC);
    out = concat(std::move(out), enumerate_catalog(Family::RP));
    out = concat(std::move(out), enumerate_catalog(Family::CS));
    out = concat(std::move(out), enumerate_catalog(Family::CR));
    return out;
}

std::vector<PrimitiveSpec> catalog_middle()
{
    auto out = catalog_outer();
    out = concat(std::move(out), enumerate_catalog(Family::CompJC));
    out = concat(std::move(out), enumerate_catalog(Family::CompRP));
    return out;
}

} // namespace emms::shapes
