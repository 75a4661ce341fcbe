#include "nmqd/core.hpp"

namespace nmqd {

std::string_view to_string(Statistics s)
{
    return s == Statistics::Boson ? "boson" : "fermion";
}

Statistics statistics_from_string(std::string_view name)
{
    if (name == "boson") return Statistics::Boson;
    if (name == "fermion") return Statistics::Fermion;
    throw InvalidArgument("unknown statistics '" + std::string(name) +
                          "' (expected boson or fermion)");
}

} // namespace nmqd
