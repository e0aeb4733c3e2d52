// Copyright 2026 The ionsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IONSIM_LINALG_HPP
#define IONSIM_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ionsim {

using real = double;
using complex = std::complex<real>;

inline constexpr real pi = 3.14159265358979323846264338327950288;

/// Raised when operand shapes do not agree, or a product exceeds the dimension cap.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an operation requiring a Hermitian operator is handed something else.
class NotHermitianError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Largest dimension any tensor product may produce. Desk-scale problems stay
/// well below this; anything above it means a Fock truncation went wrong.
inline constexpr std::size_t default_dimension_cap = std::size_t{1} << 16;

class ComplexMatrix {
  public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<complex> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_) {
            throw DimensionError("ComplexMatrix: entry count does not match rows*cols");
        }
    }

    /// Row-major nested initializer, e.g. {{0, 1}, {1, 0}}.
    ComplexMatrix(std::initializer_list<std::initializer_list<complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto &row : rows) {
            if (row.size() != cols_) {
                throw DimensionError("ComplexMatrix: ragged initializer");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return ComplexMatrix(rows, cols); }

    /// Builds a matrix that must be Hermitian; rejects inputs off by more than `tol` entrywise.
    static ComplexMatrix hermitian(std::size_t dim, std::vector<complex> entries, real tol = 1e-12) {
        ComplexMatrix m(dim, dim, std::move(entries));
        if (m.hermiticity_error() > tol) {
            throw NotHermitianError("ComplexMatrix::hermitian: input is not Hermitian");
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    bool is_square() const noexcept { return rows_ == cols_; }

    complex &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const complex &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const complex> entries() const noexcept { return data_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                out(c, r) = std::conj((*this)(r, c));
            }
        }
        return out;
    }

    complex trace() const {
        complex t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    /// max |M - M^dagger| entrywise; +inf for non-square input.
    real hermiticity_error() const {
        if (!is_square()) {
            return std::numeric_limits<real>::infinity();
        }
        real err = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = r; c < cols_; ++c) {
                err = std::max(err, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
            }
        }
        return err;
    }

    bool is_hermitian(real tol = 1e-12) const { return hermiticity_error() <= tol; }

    ComplexMatrix &operator+=(const ComplexMatrix &o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] += o.data_[i];
        }
        return *this;
    }

    ComplexMatrix &operator-=(const ComplexMatrix &o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] -= o.data_[i];
        }
        return *this;
    }

    ComplexMatrix &operator*=(complex s) {
        for (auto &x : data_) {
            x *= s;
        }
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, complex s) { return a *= s; }
    friend ComplexMatrix operator*(complex s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.cols_ != b.rows_) {
            throw DimensionError("ComplexMatrix product: inner dimensions differ");
        }
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const complex x = a(r, k);
                if (x == complex{}) {
                    continue;
                }
                for (std::size_t c = 0; c < b.cols_; ++c) {
                    out(r, c) += x * b(k, c);
                }
            }
        }
        return out;
    }

    friend bool operator==(const ComplexMatrix &, const ComplexMatrix &) = default;

  private:
    void require_same_shape(const ComplexMatrix &o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw DimensionError("ComplexMatrix: shape mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<complex> data_;
};

/// max_ij |a_ij - b_ij|.
inline real max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("max_abs_diff: shape mismatch");
    }
    real err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        err = std::max(err, std::abs(a.entries()[i] - b.entries()[i]));
    }
    return err;
}

/// max |U^dagger U - I|.
inline real unitarity_error(const ComplexMatrix &u) {
    return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.cols()));
}

class StateVec {
  public:
    StateVec() = default;
    explicit StateVec(std::size_t dim) : amps_(dim) {}
    explicit StateVec(std::vector<complex> amps) : amps_(std::move(amps)) {}
    StateVec(std::initializer_list<complex> amps) : amps_(amps) {}

    static StateVec basis(std::size_t dim, std::size_t index) {
        if (index >= dim) {
            throw DimensionError("StateVec::basis: index out of range");
        }
        StateVec v(dim);
        v[index] = 1.0;
        return v;
    }

    std::size_t dim() const noexcept { return amps_.size(); }
    bool empty() const noexcept { return amps_.empty(); }

    complex &operator[](std::size_t i) { return amps_[i]; }
    const complex &operator[](std::size_t i) const { return amps_[i]; }

    std::span<const complex> amplitudes() const noexcept { return amps_; }

    real norm_squared() const {
        real s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    real norm() const { return std::sqrt(norm_squared()); }

    StateVec normalized() const {
        const real n = norm();
        if (n == 0.0) {
            throw std::domain_error("StateVec::normalized: zero vector");
        }
        StateVec out = *this;
        for (auto &a : out.amps_) {
            a /= n;
        }
        return out;
    }

    StateVec &operator*=(complex s) {
        for (auto &a : amps_) {
            a *= s;
        }
        return *this;
    }

    StateVec &operator+=(const StateVec &o) {
        if (o.dim() != dim()) {
            throw DimensionError("StateVec: dimension mismatch");
        }
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            amps_[i] += o.amps_[i];
        }
        return *this;
    }

    friend StateVec operator*(complex s, StateVec v) { return v *= s; }
    friend StateVec operator*(StateVec v, complex s) { return v *= s; }
    friend StateVec operator+(StateVec a, const StateVec &b) { return a += b; }

    /// |psi><psi|
    ComplexMatrix projector() const {
        ComplexMatrix out(dim(), dim());
        for (std::size_t r = 0; r < dim(); ++r) {
            for (std::size_t c = 0; c < dim(); ++c) {
                out(r, c) = amps_[r] * std::conj(amps_[c]);
            }
        }
        return out;
    }

    friend bool operator==(const StateVec &, const StateVec &) = default;

  private:
    std::vector<complex> amps_;
};

/// <a|b>
inline complex inner(const StateVec &a, const StateVec &b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("inner: dimension mismatch");
    }
    complex s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

inline real max_abs_diff(const StateVec &a, const StateVec &b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("max_abs_diff: dimension mismatch");
    }
    real err = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        err = std::max(err, std::abs(a[i] - b[i]));
    }
    return err;
}

inline StateVec operator*(const ComplexMatrix &m, const StateVec &v) {
    if (m.cols() != v.dim()) {
        throw DimensionError("matrix-vector product: dimension mismatch");
    }
    StateVec out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        complex s = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            s += m(r, c) * v[c];
        }
        out[r] = s;
    }
    return out;
}

namespace detail {

inline std::size_t checked_product(std::size_t a, std::size_t b, std::size_t cap) {
    if (a != 0 && b > cap / a) {
        throw DimensionError("tensor: truncation too large (dimension " + std::to_string(a) + " x " +
                             std::to_string(b) + " exceeds cap " + std::to_string(cap) + ")");
    }
    if (a * b > cap) {
        throw DimensionError("tensor: truncation too large (dimension " + std::to_string(a * b) +
                             " exceeds cap " + std::to_string(cap) + ")");
    }
    return a * b;
}

} // namespace detail

/// Kronecker product a (x) b. The left operand is the slow index.
inline ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b,
                            std::size_t cap = default_dimension_cap) {
    if (a.empty() || b.empty()) {
        throw DimensionError("tensor: empty operand");
    }
    const std::size_t rows = detail::checked_product(a.rows(), b.rows(), cap);
    const std::size_t cols = detail::checked_product(a.cols(), b.cols(), cap);
    ComplexMatrix out(rows, cols);
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const complex x = a(ar, ac);
            if (x == complex{}) {
                continue;
            }
            for (std::size_t br = 0; br < b.rows(); ++br) {
                for (std::size_t bc = 0; bc < b.cols(); ++bc) {
                    out(ar * b.rows() + br, ac * b.cols() + bc) = x * b(br, bc);
                }
            }
        }
    }
    return out;
}

inline StateVec tensor(const StateVec &a, const StateVec &b, std::size_t cap = default_dimension_cap) {
    if (a.empty() || b.empty()) {
        throw DimensionError("tensor: empty operand");
    }
    StateVec out(detail::checked_product(a.dim(), b.dim(), cap));
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            out[i * b.dim() + j] = a[i] * b[j];
        }
    }
    return out;
}

/// Reduced density operator over the subsystems listed in `keep`.
///
/// `dims` lists subsystem dimensions in tensor order (first entry is the
/// slowest index). The kept subsystems appear in the result in ascending
/// subsystem order, regardless of the order given in `keep`.
inline ComplexMatrix partial_trace(const ComplexMatrix &rho, std::span<const std::size_t> keep,
                                   std::span<const std::size_t> dims) {
    const std::size_t total =
        std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
    if (!rho.is_square() || rho.rows() != total || dims.empty()) {
        throw DimensionError("partial_trace: subsystem dimensions do not match the operator");
    }
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size() || kept[k]) {
            throw DimensionError("partial_trace: invalid or repeated subsystem index");
        }
        kept[k] = true;
    }

    std::size_t kept_dim = 1;
    for (std::size_t s = 0; s < dims.size(); ++s) {
        if (kept[s]) {
            kept_dim *= dims[s];
        }
    }

    // Map every full-space index to (kept index, traced index).
    std::vector<std::size_t> kept_index(total);
    std::vector<std::size_t> traced_index(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        std::size_t ki = 0;
        std::size_t ti = 0;
        std::size_t kstride = 1;
        std::size_t tstride = 1;
        for (std::size_t s = dims.size(); s-- > 0;) {
            const std::size_t digit = rem % dims[s];
            rem /= dims[s];
            if (kept[s]) {
                ki += digit * kstride;
                kstride *= dims[s];
            } else {
                ti += digit * tstride;
                tstride *= dims[s];
            }
        }
        kept_index[i] = ki;
        traced_index[i] = ti;
    }

    ComplexMatrix out(kept_dim, kept_dim);
    for (std::size_t r = 0; r < total; ++r) {
        for (std::size_t c = 0; c < total; ++c) {
            if (traced_index[r] == traced_index[c]) {
                out(kept_index[r], kept_index[c]) += rho(r, c);
            }
        }
    }
    return out;
}

inline ComplexMatrix partial_trace(const ComplexMatrix &rho, std::initializer_list<std::size_t> keep,
                                   std::initializer_list<std::size_t> dims) {
    return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()),
                         std::span<const std::size_t>(dims.begin(), dims.size()));
}

/// exp(-i h t) for Hermitian h, via eigendecomposition.
inline ComplexMatrix mat_exp(const ComplexMatrix &h, real t, real hermitian_tol = 1e-10) {
    if (!h.is_square()) {
        throw DimensionError("mat_exp: operator is not square");
    }
    if (h.hermiticity_error() > hermitian_tol) {
        throw NotHermitianError("mat_exp: operator is not Hermitian");
    }
    const auto n = static_cast<Eigen::Index>(h.rows());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            // Symmetrize so the solver sees an exactly Hermitian input.
            m(r, c) = 0.5 * (h(r, c) + std::conj(h(c, r)));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("mat_exp: eigendecomposition failed");
    }
    const Eigen::VectorXd &evals = solver.eigenvalues();
    const Eigen::MatrixXcd &evecs = solver.eigenvectors();
    Eigen::VectorXcd phases(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        phases(i) = std::exp(complex(0.0, -evals(i) * t));
    }
    const Eigen::MatrixXcd u = evecs * phases.asDiagonal() * evecs.adjoint();

    ComplexMatrix out(h.rows(), h.cols());
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            out(r, c) = u(r, c);
        }
    }
    return out;
}

/// Trace-overlap fidelity Tr{rho sigma}. Exact for the case where either argument is pure.
inline real fidelity(const ComplexMatrix &rho, const ComplexMatrix &sigma) {
    if (!rho.is_square() || rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw DimensionError("fidelity: dimension mismatch");
    }
    complex tr = 0.0;
    for (std::size_t r = 0; r < rho.rows(); ++r) {
        for (std::size_t c = 0; c < rho.cols(); ++c) {
            tr += rho(r, c) * sigma(c, r);
        }
    }
    real f = tr.real();
    constexpr real edge = 1e-9;
    if (f < 0.0 && f > -edge) {
        f = 0.0;
    } else if (f > 1.0 && f < 1.0 + edge) {
        f = 1.0;
    }
    return f;
}

inline real fidelity(const StateVec &psi, const ComplexMatrix &sigma) { return fidelity(psi.projector(), sigma); }

/// Pauli operators in the {down, up} = {0, 1} basis.
namespace pauli {
inline ComplexMatrix x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix y() { return {{0.0, complex(0.0, -1.0)}, {complex(0.0, 1.0), 0.0}}; }
inline ComplexMatrix z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
} // namespace pauli

} // namespace ionsim

#endif // IONSIM_LINALG_HPP
