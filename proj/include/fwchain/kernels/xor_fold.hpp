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

#pragma once

#include <cstdint>

#include "fwchain/bytes.hpp"

namespace fwchain::kernels {

// XOR-fold of a byte range, the bootloader wire checksum. Dispatches to the
// AVX2 variant for long inputs.
std::uint8_t xor_fold(ByteView data);

namespace detail {
std::uint8_t xor_fold_scalar(ByteView data);
std::uint8_t xor_fold_avx2(ByteView data);
}  // namespace detail

}  // namespace fwchain::kernels
