#pragma once

#include <string_view>

namespace pdfrac {

/// Writes a one-line warning to stderr unless warnings are muted.
void warn(std::string_view message);
void set_warnings_muted(bool muted);

} // namespace pdfrac
