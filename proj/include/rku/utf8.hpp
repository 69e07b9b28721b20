#pragma once

#include <string>
#include <string_view>

namespace rku::utf8 {

/// Invalid or truncated sequences decode to U+FFFD.
std::u32string decode(std::string_view bytes);
std::string encode(std::u32string_view code_points);

}  // namespace rku::utf8
