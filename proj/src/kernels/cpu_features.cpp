/*
 * Copyright 2026 The Fwchain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cpu_features.hpp"

#include <cstdint>

#if defined(__x86_64__) || defined(__i386__)
#include <cpuid.h>
#endif

namespace fwchain::kernels {

namespace {

struct Features {
  bool avx2 = false;
  bool sha_ni = false;
};

Features detect() {
  Features f;
#if defined(__x86_64__) || defined(__i386__)
  unsigned eax = 0, ebx = 0, ecx = 0, edx = 0;
  if (__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) {
    f.avx2 = (ebx & (1u << 5)) != 0;
    f.sha_ni = (ebx & (1u << 29)) != 0;
  }
  // AVX2 additionally needs OS support for YMM state (XGETBV XCR0[2:1]).
  if (f.avx2) {
    if (__get_cpuid(1, &eax, &ebx, &ecx, &edx)) {
      bool osxsave = (ecx & (1u << 27)) != 0;
      if (!osxsave) {
        f.avx2 = false;
      } else {
        std::uint32_t xcr0_lo, xcr0_hi;
        __asm__("xgetbv" : "=a"(xcr0_lo), "=d"(xcr0_hi) : "c"(0));
        if ((xcr0_lo & 0x6) != 0x6) f.avx2 = false;
      }
    } else {
      f.avx2 = false;
    }
  }
#endif
  return f;
}

const Features& features() {
  static const Features f = detect();
  return f;
}

}  // namespace

bool cpu_has_avx2() { return features().avx2; }
bool cpu_has_sha_ni() { return features().sha_ni; }

}  // namespace fwchain::kernels
