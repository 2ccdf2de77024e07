#pragma once

#include <charconv>
#include <string>

namespace mosaic {

// Formats with 9 significant digits, locale-independent ('.' decimal point),
// trailing zeros stripped. Every float that reaches a trace, summary, or plot
// goes through here so re-emits are byte-identical.
inline std::string fmt_g9(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value,
                           std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

}  // namespace mosaic
