#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace oocpipe {

uint64_t next_pow2(uint64_t n);

// In-place iterative radix-2 transform; a.size() must be a power of two.
// The inverse applies the 1/N normalization.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

}  // namespace oocpipe
