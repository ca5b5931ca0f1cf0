#pragma once

#include <complex>
#include <vector>

#include "sta/core.hpp"

namespace sta {

/// Unitary-normalized FFT pair on power-of-two sizes (FFTW backend, plans
/// cached per size). forward: f_k = sum_j a_j exp(-i k j 2pi/n) / 1,
/// backward applies 1/n. Frequencies follow the usual wrap convention.
void fft_forward(std::vector<cplx>& data);
void fft_backward(std::vector<cplx>& data);

/// Physical wavenumber of FFT bin j for a grid with spacing dx:
/// k_j = 2 pi jj / (n dx) with jj = j (j < n/2) or j - n.
double fft_wavenumber(int j, int n, double dx);

}  // namespace sta
