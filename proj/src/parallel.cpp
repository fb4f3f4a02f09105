#include "rsm/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace rsm::parallel {
namespace {
std::atomic<int> g_jobs{1};
}

void set_jobs(int n) { g_jobs.store(std::max(1, n)); }
int jobs() { return g_jobs.load(); }

}  // namespace rsm::parallel
