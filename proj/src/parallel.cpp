#include "covaudit/parallel.hpp"

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace covaudit {

int env_thread_cap() {
  const char* s = std::getenv("COVAUDIT_THREADS");
  if (!s || !*s) return 0;
  int v = std::atoi(s);
  return v > 0 ? v : 0;
}

void apply_thread_cap() {
#ifdef _OPENMP
  int cap = env_thread_cap();
  if (cap > 0) omp_set_num_threads(cap);
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace covaudit
