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

#include "fwchain/kernels/xor_fold.hpp"

#include "cpu_features.hpp"

namespace fwchain::kernels {

namespace detail {

std::uint8_t xor_fold_scalar(ByteView data) {
  std::uint8_t x = 0;
  for (auto b : data) x ^= b;
  return x;
}

}  // namespace detail

std::uint8_t xor_fold(ByteView data) {
  if (data.size() >= 64 && cpu_has_avx2()) return detail::xor_fold_avx2(data);
  return detail::xor_fold_scalar(data);
}

}  // namespace fwchain::kernels
