#include "chromawave/parallel.hpp"

#include <cstdlib>
#include <string>

namespace chromawave {

unsigned default_thread_count() {
  if (const char* env = std::getenv("CHROMAWAVE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace chromawave
