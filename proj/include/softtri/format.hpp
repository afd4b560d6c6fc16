#pragma once

#include <cstdio>
#include <string>

namespace softtri {

/// Fixed textual form used by every CSV and CLI output: 12 significant digits.
inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace softtri
