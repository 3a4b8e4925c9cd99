#include "stubborn/parallel.hpp"

namespace stubborn {

unsigned resolve_worker_count(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace stubborn
