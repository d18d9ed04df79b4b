#include "pdfrac/log.hpp"

#include <atomic>
#include <iostream>

namespace pdfrac {

namespace {
std::atomic<bool> g_muted{false};
}

void warn(std::string_view message) {
  if (!g_muted.load())
    std::cerr << "warning: " << message << '\n';
}

void set_warnings_muted(bool muted) { g_muted.store(muted); }

} // namespace pdfrac
