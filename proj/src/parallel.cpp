#include "qlc/parallel.hpp"

#include <cstdlib>
#include <string>

namespace qlc {

std::size_t thread_limit() {
  if (const char* env = std::getenv("QLC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace detail {
bool& inside_parallel_region() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

}  // namespace qlc
