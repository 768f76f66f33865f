#include "subrep/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace subrep {

namespace {
std::atomic<int> g_default_threads{0};
}

void set_default_threads(int threads) { g_default_threads = threads > 0 ? threads : 0; }

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const int d = g_default_threads.load(); d > 0) return d;
  if (const char* env = std::getenv("SUBREP_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return 1;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace subrep
