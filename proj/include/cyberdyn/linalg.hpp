#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace cyberdyn {

inline double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void scale_in_place(std::span<double> x, double f) {
    for (double& v : x) v *= f;
}

struct DenseMatrix {
    int n = 0;
    std::vector<double> a;  // row-major n*n

    DenseMatrix() = default;
    explicit DenseMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }

    static DenseMatrix identity(int size) {
        DenseMatrix m(size);
        for (int i = 0; i < size; ++i) m.at(i, i) = 1.0;
        return m;
    }

    void apply(std::span<const double> x, std::span<double> out) const {
        for (int r = 0; r < n; ++r) {
            double s = 0.0;
            const double* row = a.data() + static_cast<std::size_t>(r) * n;
            for (int c = 0; c < n; ++c) s += row[c] * x[static_cast<std::size_t>(c)];
            out[static_cast<std::size_t>(r)] = s;
        }
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : a) s += v * v;
        return std::sqrt(s);
    }

    // Largest singular value by power iteration on A^T A.
    double spectral_norm(int iters = 200) const {
        if (n == 0) return 0.0;
        std::vector<double> x(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
        std::vector<double> y(static_cast<std::size_t>(n), 0.0);
        std::vector<double> z(static_cast<std::size_t>(n), 0.0);
        double sigma = 0.0;
        for (int it = 0; it < iters; ++it) {
            apply(x, y);  // y = A x
            for (int c = 0; c < n; ++c) {
                double s = 0.0;
                for (int r = 0; r < n; ++r) s += a[static_cast<std::size_t>(r) * n + c] * y[static_cast<std::size_t>(r)];
                z[static_cast<std::size_t>(c)] = s;  // z = A^T y
            }
            double nz = norm2(z);
            if (nz == 0.0) return 0.0;
            for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] / nz;
            sigma = std::sqrt(nz);
        }
        return sigma;
    }
};

// Compressed sparse rows; row r holds the in-arc couplings of node r plus the diagonal.
struct SparseMatrix {
    int n = 0;
    std::vector<int> row_ptr;  // size n+1
    std::vector<int> cols;
    std::vector<double> vals;

    void apply(std::span<const double> x, std::span<double> out) const {
        for (int r = 0; r < n; ++r) {
            double s = 0.0;
            for (int k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
                s += vals[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)])];
            }
            out[static_cast<std::size_t>(r)] = s;
        }
    }

    double entry(int r, int c) const {
        for (int k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            if (cols[static_cast<std::size_t>(k)] == c) return vals[static_cast<std::size_t>(k)];
        }
        return 0.0;
    }

    DenseMatrix to_dense() const {
        DenseMatrix m(n);
        for (int r = 0; r < n; ++r) {
            for (int k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
                m.at(r, cols[static_cast<std::size_t>(k)]) += vals[static_cast<std::size_t>(k)];
            }
        }
        return m;
    }
};

// Perron value of a nonnegative matrix given as a matvec; a +I shift damps
// period-2 oscillation on bipartite-ish structures.
template <class Apply>
double perron_value(int n, Apply&& apply, int iters = 300) {
    if (n == 0) return 0.0;
    std::vector<double> x(static_cast<std::size_t>(n), 1.0);
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        apply(std::span<const double>(x), std::span<double>(y));
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)];
        double ny = norm2(y);
        if (ny == 0.0) return 0.0;
        lambda = ny;  // Rayleigh-free estimate; refined below
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] / ny;
    }
    // One more multiply for the Rayleigh quotient of the shifted operator.
    apply(std::span<const double>(x), std::span<double>(y));
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)];
    lambda = dot(x, y) / dot(x, x);
    return lambda - 1.0;
}

}  // namespace cyberdyn
