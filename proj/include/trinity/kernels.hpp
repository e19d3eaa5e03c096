#pragma once

#include <cstdint>

namespace trinity {

// Per-kernel event counts at fixed granularity: ntt/intt/modmul/modadd/auto
// count limb or component transforms, bconv counts basis-conversion events,
// ip counts one (output, digit-row) pointwise multiply-accumulate. The
// accelerator model builds its kernel graphs at the same granularity, so the
// recorded route and the analytic route must agree exactly.
struct KernelCounts {
  uint64_t ntt = 0, intt = 0, bconv = 0, ip = 0, modmul = 0, modadd = 0, auto_perm = 0;
  uint64_t total() const { return ntt + intt + bconv + ip + modmul + modadd + auto_perm; }
};

}  // namespace trinity
