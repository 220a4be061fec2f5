#pragma once

#include <cassert>
#include <chrono>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gmg/backend.hpp"
#include "gmg/grid.hpp"

namespace gmg {

namespace detail {

inline bool is_pow2(int x) { return x > 0 && (x & (x - 1)) == 0; }

/// Iterative radix-2 complex FFT with precomputed twiddles and bit-reversal
/// table. Forward transform only (sign -1); that is all the sine transform
/// needs.
class Fft {
public:
    explicit Fft(int m) : m_(m), rev_(m), tw_(m / 2) {
        assert(is_pow2(m));
        int lg = 0;
        while ((1 << lg) < m) ++lg;
        for (int i = 0; i < m; ++i) {
            int r = 0;
            for (int b = 0; b < lg; ++b)
                if (i & (1 << b)) r |= 1 << (lg - 1 - b);
            rev_[i] = r;
        }
        for (int k = 0; k < m / 2; ++k) {
            const double ang = -2.0 * std::numbers::pi * k / m;
            tw_[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    int size() const { return m_; }

    void forward(std::complex<double>* a) const {
        for (int i = 0; i < m_; ++i)
            if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
        for (int len = 2; len <= m_; len <<= 1) {
            const int half = len / 2;
            const int step = m_ / len;
            for (int base = 0; base < m_; base += len) {
                for (int j = 0; j < half; ++j) {
                    const std::complex<double> w = tw_[j * step];
                    const std::complex<double> t = w * a[base + j + half];
                    const std::complex<double> u = a[base + j];
                    a[base + j] = u + t;
                    a[base + j + half] = u - t;
                }
            }
        }
    }

    /// Standard radix-2 operation count: 10 real flops per butterfly.
    double flops_per_transform() const {
        double lg = std::log2(static_cast<double>(m_));
        return 5.0 * m_ * lg;
    }

private:
    int m_;
    std::vector<int> rev_;
    std::vector<std::complex<double>> tw_;
};

} // namespace detail

/// Type-I discrete sine transform of vectors of length n-1, computed through
/// a complex FFT of the odd extension (length 2n). Applying it twice scales
/// the input by n/2.
class Dst1 {
public:
    explicit Dst1(int n) : n_(n), fft_(2 * n) {
        if (!detail::is_pow2(n))
            throw std::invalid_argument("sine transform length must be 2^k - 1");
    }

    int n() const { return n_; }

    /// In-place transform of x[0..n-2]; scratch must hold 2n complex values.
    void apply(double* x, std::complex<double>* scratch) const {
        const int n = n_;
        scratch[0] = 0.0;
        scratch[n] = 0.0;
        for (int j = 1; j < n; ++j) {
            scratch[j] = x[j - 1];
            scratch[2 * n - j] = -x[j - 1];
        }
        fft_.forward(scratch);
        for (int k = 1; k < n; ++k) x[k - 1] = -0.5 * scratch[k].imag();
    }

    double flops_per_apply() const {
        // odd extension negations + FFT + extraction scaling
        return (n_ - 1) + fft_.flops_per_transform() + (n_ - 1);
    }

private:
    int n_;
    detail::Fft fft_;
};

/// Convenience vector form of the type-I sine transform.
inline std::vector<double> sine_transform(std::vector<double> x) {
    const int n = static_cast<int>(x.size()) + 1;
    Dst1 dst(n);
    std::vector<std::complex<double>> scratch(2 * static_cast<std::size_t>(n));
    dst.apply(x.data(), scratch.data());
    return x;
}

template <int D>
struct SpectralResult {
    GridField<D> u;
    double flops = 0;
    double seconds = 0;
};

/// Direct Poisson solve by sine transforms: transform the right-hand side,
/// divide each mode by its discrete Laplacian eigenvalue
/// sum_a (4/h^2) sin^2(k_a pi h / 2), and transform back. The input holds
/// unscaled point samples of f; the result is the exact solution of the
/// discrete system.
template <int D>
SpectralResult<D> poisson_direct(const GridField<D>& f, Engine& engine) {
    const int n = f.grid.cells;
    if (!detail::is_pow2(n))
        throw std::invalid_argument("spectral solve needs a power-of-two grid");
    const double h = f.grid.spacing;
    const index_t np = f.grid.points();
    const auto t0 = std::chrono::steady_clock::now();

    SpectralResult<D> out;
    out.u = f;  // copy, transformed in place
    out.u.space = Space::host;
    double* w = out.u.data();

    const Dst1 dst(n);
    const index_t lines_per_axis = D == 2 ? n - 1 : static_cast<index_t>(n - 1) * (n - 1);
    double flops = 0;

    auto axis_pass = [&](int axis) {
        engine.run(lines_per_axis, [&, axis](index_t t) {
            thread_local std::vector<std::complex<double>> scratch;
            thread_local std::vector<double> line;
            scratch.resize(2 * static_cast<std::size_t>(n));
            line.resize(static_cast<std::size_t>(n - 1));

            const index_t o1 = 1 + t % (n - 1);
            const index_t o2 = D == 3 ? 1 + t / (n - 1) : 0;
            index_t base, stride;
            if constexpr (D == 2) {
                base = axis == 0 ? o1 * np + 1 : np + o1;
                stride = axis == 0 ? 1 : np;
            } else {
                if (axis == 0) {
                    base = (o2 * np + o1) * np + 1;
                    stride = 1;
                } else if (axis == 1) {
                    base = (o2 * np + 1) * np + o1;
                    stride = np;
                } else {
                    base = (np + o1) * np + o2;
                    stride = np * np;
                }
            }
            for (int i = 0; i < n - 1; ++i) line[i] = w[base + i * stride];
            dst.apply(line.data(), scratch.data());
            for (int i = 0; i < n - 1; ++i) w[base + i * stride] = line[i];
        });
        flops += static_cast<double>(lines_per_axis) * dst.flops_per_apply();
    };

    for (int a = 0; a < D; ++a) axis_pass(a);

    // eigenvalues of the one-dimensional second difference, Dirichlet modes
    std::vector<double> lambda(static_cast<std::size_t>(n));
    for (int k = 1; k < n; ++k) {
        const double s = std::sin(0.5 * std::numbers::pi * k * h);
        lambda[k] = 4.0 / (h * h) * s * s;
    }
    flops += 4.0 * (n - 1);

    // fold the inverse-transform normalization (n/2 per axis) into the division
    const double inv_norm = std::pow(2.0 / n, D);
    engine.run(lines_per_axis, [&](index_t t) {
        const index_t kj = 1 + t % (n - 1);
        const index_t kk = D == 3 ? 1 + t / (n - 1) : 0;
        const index_t base = D == 2 ? kj * np : (kk * np + kj) * np;
        const double other =
            D == 2 ? lambda[kj] : lambda[kj] + lambda[static_cast<std::size_t>(kk)];
        for (int ki = 1; ki < n; ++ki) {
            const double lam = lambda[ki] + other;
            assert(lam > 0.0);
            w[base + ki] = w[base + ki] * inv_norm / lam;
        }
    });
    flops += static_cast<double>(lines_per_axis) * (n - 1) * (D + 1);

    for (int a = 0; a < D; ++a) axis_pass(a);

    out.flops = flops;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace gmg
