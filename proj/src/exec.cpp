#include "kvplate/exec.hpp"

#include <omp.h>

namespace kvplate {

int hardware_threads() { return omp_get_max_threads(); }

}  // namespace kvplate
