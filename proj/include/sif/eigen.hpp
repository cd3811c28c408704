#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace sif {

/// Square real matrix, row-major.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}
    DenseMatrix(std::size_t size, std::vector<double> values);

    static DenseMatrix identity(std::size_t size);

    double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
    double trace() const;
    bool finite() const;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

struct Balanced {
    DenseMatrix matrix; ///< D^{-1} A D
    std::vector<double> scale; ///< diagonal of D, powers of 2
};

/// Parlett-Reinsch balancing with radix 2.
Balanced balance(DenseMatrix a);

/// Upper Hessenberg form by Householder reflections (orthogonal similarity).
DenseMatrix hessenberg(DenseMatrix a);

struct Spectrum {
    std::vector<std::complex<double>> values;
    long iterations = 0; ///< total QR sweeps
    bool converged = false;
    std::size_t deflated = 0; ///< eigenvalues found before a failure
};

/// Francis double-shift QR on an upper Hessenberg matrix. Never throws; a
/// spectrum with converged == false carries the eigenvalues deflated so far.
Spectrum hessenberg_qr(DenseMatrix h);

/// All eigenvalues of a real matrix: balance, reduce, iterate.
/// Throws ConfigError for n > 1024 or non-finite entries, NoConvergence after 30 n sweeps.
Spectrum eigenvalues(const DenseMatrix& a);

/// Determinant by LU with partial pivoting.
double determinant(DenseMatrix a);

/// Modulus descending, then real part descending, then imaginary part descending.
void sort_by_modulus(std::vector<std::complex<double>>& values);

} // namespace sif
