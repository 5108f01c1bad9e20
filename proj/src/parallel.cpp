#include "maillet/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace maillet {

namespace {

unsigned env_thread_cap() {
    const char* raw = std::getenv("MAILLET_THREADS");
    if (raw == nullptr) return 0;
    std::string_view text(raw);
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return 0;
    return value;
}

} // namespace

unsigned resolve_threads(Parallelism par) {
    if (par.threads > 0) return par.threads;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned cap = env_thread_cap();
    return cap > 0 ? std::min(hw, cap) : hw;
}

} // namespace maillet
