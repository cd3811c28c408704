#include "sif/eigen.hpp"

#include "sif/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sif {

DenseMatrix::DenseMatrix(std::size_t size, std::vector<double> values) : n(size), data(std::move(values))
{
    if (data.size() != n * n)
        throw ConfigError("matrix of size " + std::to_string(n) + " needs " + std::to_string(n * n) + " entries");
}

DenseMatrix DenseMatrix::identity(std::size_t size)
{
    DenseMatrix m(size);
    for (std::size_t i = 0; i < size; ++i) m(i, i) = 1.0;
    return m;
}

double DenseMatrix::trace() const
{
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
    return t;
}

bool DenseMatrix::finite() const
{
    return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.n != b.n) throw ConfigError("matrix product of mismatched sizes");
    const std::size_t n = a.n;
    DenseMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a)
{
    DenseMatrix t(a.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j) t(j, i) = a(i, j);
    return t;
}

Balanced balance(DenseMatrix a)
{
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const std::size_t n = a.n;
    std::vector<double> scale(n, 1.0);
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                scale[i] *= f;
                const double inv = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
    return {std::move(a), std::move(scale)};
}

DenseMatrix hessenberg(DenseMatrix a)
{
    const std::size_t n = a.n;
    std::vector<double> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        // scaled so the squared norms cannot underflow
        double scale = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) scale = std::max(scale, std::abs(a(i, k)));
        if (scale == 0.0) continue;
        double norm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k) / scale;
            norm2 += v[i] * v[i];
        }
        const double alpha = v[k + 1] > 0.0 ? -std::sqrt(norm2) : std::sqrt(norm2);
        v[k + 1] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
        const double beta = 2.0 / vnorm2;
        // A <- (I - beta v v^T) A
        for (std::size_t j = k; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) dot += v[i] * a(i, j);
            dot *= beta;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= dot * v[i];
        }
        // A <- A (I - beta v v^T)
        for (std::size_t i = 0; i < n; ++i) {
            double dot = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
            dot *= beta;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= dot * v[j];
        }
        a(k + 1, k) = alpha * scale;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
    return a;
}

Spectrum hessenberg_qr(DenseMatrix h)
{
    constexpr double tol = 1e-14;
    const long n = static_cast<long>(h.n);
    auto a = [&](long i, long j) -> double& { return h.data[static_cast<std::size_t>(i * n + j)]; };
    auto sign = [](double x, double y) { return y >= 0.0 ? std::abs(x) : -std::abs(x); };

    Spectrum out;
    std::vector<double> wr(h.n, 0.0), wi(h.n, 0.0);
    double anorm = 0.0;
    for (long i = 0; i < n; ++i)
        for (long j = std::max(i - 1, 0L); j < n; ++j) anorm += std::abs(a(i, j));

    const long cap = 30 * std::max(n, 1L);
    long nn = n - 1;
    double t = 0.0; // accumulated exceptional shifts
    int its = 0;
    while (nn >= 0) {
        long l = nn;
        for (; l >= 1; --l) {
            double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
            if (s == 0.0) s = anorm;
            if (std::abs(a(l, l - 1)) <= tol * s) {
                a(l, l - 1) = 0.0;
                break;
            }
        }
        double x = a(nn, nn);
        if (l == nn) {
            wr[static_cast<std::size_t>(nn)] = x + t;
            --nn;
            its = 0;
            continue;
        }
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
            const double p = 0.5 * (y - x);
            const double q = p * p + w;
            double z = std::sqrt(std::abs(q));
            x += t;
            const auto i1 = static_cast<std::size_t>(nn - 1), i2 = static_cast<std::size_t>(nn);
            if (q >= 0.0) {
                z = p + sign(z, p);
                wr[i1] = wr[i2] = x + z;
                if (z != 0.0) wr[i2] = x - w / z;
            } else {
                wr[i1] = wr[i2] = x + p;
                wi[i1] = z;
                wi[i2] = -z;
            }
            nn -= 2;
            its = 0;
            continue;
        }
        if (out.iterations >= cap) {
            out.deflated = static_cast<std::size_t>(n - 1 - nn);
            for (std::size_t i = out.deflated; i-- > 0;)
                out.values.emplace_back(wr[static_cast<std::size_t>(n) - 1 - i], wi[static_cast<std::size_t>(n) - 1 - i]);
            out.converged = false;
            return out;
        }
        if (its > 0 && its % 10 == 0) {
            t += x;
            for (long i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
        }
        ++its;
        ++out.iterations;

        long m = nn - 2;
        double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
        for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= tol * v) break;
        }
        for (long i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
        }
        for (long k = m; k < nn; ++k) {
            if (k != m) {
                p = a(k, k - 1);
                q = a(k + 1, k - 1);
                r = k + 1 != nn ? a(k + 2, k - 1) : 0.0;
                x = std::abs(p) + std::abs(q) + std::abs(r);
                if (x != 0.0) {
                    p /= x;
                    q /= x;
                    r /= x;
                }
            }
            const double s = sign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
                a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (long j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k + 1 != nn) {
                    p += r * a(k + 2, j);
                    a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
            }
            const long mmin = std::min(nn, k + 3);
            for (long i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k + 1 != nn) {
                    p += z * a(i, k + 2);
                    a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
            }
        }
    }
    out.values.reserve(h.n);
    for (std::size_t i = 0; i < h.n; ++i) out.values.emplace_back(wr[i], wi[i]);
    out.deflated = h.n;
    out.converged = true;
    return out;
}

Spectrum eigenvalues(const DenseMatrix& a)
{
    if (a.n > 1024) throw ConfigError("dense eigensolver supports n <= 1024, got " + std::to_string(a.n));
    if (!a.finite()) throw ConfigError("matrix has non-finite entries");
    Spectrum s = hessenberg_qr(hessenberg(balance(a).matrix));
    if (!s.converged)
        throw no_convergence("QR iteration stopped after " + std::to_string(s.iterations) + " sweeps with " +
                             std::to_string(s.deflated) + " of " + std::to_string(a.n) + " eigenvalues deflated");
    return s;
}

double determinant(DenseMatrix a)
{
    const std::size_t n = a.n;
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            det = -det;
        }
        const double d = a(k, k);
        det *= d;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / d;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

void sort_by_modulus(std::vector<std::complex<double>>& values)
{
    std::stable_sort(values.begin(), values.end(), [](const auto& x, const auto& y) {
        const double ax = std::abs(x), ay = std::abs(y);
        if (ax != ay) return ax > ay;
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
}

} // namespace sif
