#ifndef HSBM_SPARSE_HPP
#define HSBM_SPARSE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hsbm {

template <class T>
struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    T value;
};

// Symmetric sparse matrix. The full pattern is kept in CSR form so that
// rows can be scanned and multiplied without reflecting the upper triangle;
// triplets() reports the i <= j half.
template <class T>
class SparseSymMatrix {
public:
    using value_type = T;

    SparseSymMatrix() = default;
    explicit SparseSymMatrix(std::size_t n) : n_(n), row_ptr_(n + 1, 0) {}

    // Builds from i <= j triplets; duplicates are summed, zeros dropped.
    static SparseSymMatrix from_upper(std::size_t n, std::vector<Triplet<T>> upper) {
        std::vector<Triplet<T>> full;
        full.reserve(upper.size() * 2);
        for (const auto& t : upper) {
            if (t.row >= n || t.col >= n) throw std::out_of_range("triplet index out of range");
            if (t.row > t.col) throw std::invalid_argument("from_upper expects row <= col");
            full.push_back(t);
            if (t.row != t.col) full.push_back({t.col, t.row, t.value});
        }
        return from_full(n, std::move(full));
    }

    // Builds from a full (already symmetric) triplet list; duplicates summed.
    static SparseSymMatrix from_full(std::size_t n, std::vector<Triplet<T>> full) {
        std::sort(full.begin(), full.end(), [](const auto& x, const auto& y) {
            return x.row != y.row ? x.row < y.row : x.col < y.col;
        });
        SparseSymMatrix m(n);
        for (std::size_t k = 0; k < full.size();) {
            std::size_t end = k;
            T sum{};
            while (end < full.size() && full[end].row == full[k].row && full[end].col == full[k].col) {
                sum += full[end].value;
                ++end;
            }
            if (sum != T{}) {
                m.cols_.push_back(full[k].col);
                m.vals_.push_back(sum);
                ++m.row_ptr_[full[k].row + 1];
            }
            k = end;
        }
        for (std::size_t i = 0; i < n; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
        return m;
    }

    // Builds from per-row (col, value) lists sorted by column. The caller
    // guarantees symmetry; is_symmetric() can confirm it.
    static SparseSymMatrix from_rows(std::vector<std::vector<std::pair<std::uint32_t, T>>> rows) {
        SparseSymMatrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (const auto& [col, val] : rows[i]) {
                if (val == T{}) continue;
                m.cols_.push_back(col);
                m.vals_.push_back(val);
            }
            m.row_ptr_[i + 1] = m.cols_.size();
        }
        return m;
    }

    static SparseSymMatrix identity(std::size_t n) {
        SparseSymMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            m.cols_.push_back(static_cast<std::uint32_t>(i));
            m.vals_.push_back(T{1});
            m.row_ptr_[i + 1] = i + 1;
        }
        return m;
    }

    std::size_t size() const { return n_; }
    std::size_t nnz() const { return vals_.size(); }

    std::span<const std::uint32_t> row_cols(std::size_t i) const {
        return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    std::span<const T> row_values(std::size_t i) const {
        return {vals_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }

    T at(std::size_t i, std::size_t j) const {
        auto cols = row_cols(i);
        auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(j));
        if (it == cols.end() || *it != j) return T{};
        return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
    }

    T row_sum(std::size_t i) const {
        T s{};
        for (T v : row_values(i)) s += v;
        return s;
    }

    // y = M x
    void multiply(std::span<const double> x, std::span<double> y) const {
        for (std::size_t i = 0; i < n_; ++i) {
            double acc = 0.0;
            const std::size_t end = row_ptr_[i + 1];
            for (std::size_t k = row_ptr_[i]; k < end; ++k) {
                acc += static_cast<double>(vals_[k]) * x[cols_[k]];
            }
            y[i] = acc;
        }
    }

    std::vector<double> multiply(std::span<const double> x) const {
        std::vector<double> y(n_);
        multiply(x, y);
        return y;
    }

    // Sparse product; the result is symmetric only when the factors commute,
    // which holds for powers of a single matrix.
    SparseSymMatrix power_product(const SparseSymMatrix& other) const {
        std::vector<std::vector<std::pair<std::uint32_t, T>>> rows(n_);
        std::vector<T> acc(n_, T{});
        std::vector<std::uint32_t> touched;
        for (std::size_t i = 0; i < n_; ++i) {
            touched.clear();
            auto cols = row_cols(i);
            auto vals = row_values(i);
            for (std::size_t a = 0; a < cols.size(); ++a) {
                auto ocols = other.row_cols(cols[a]);
                auto ovals = other.row_values(cols[a]);
                for (std::size_t b = 0; b < ocols.size(); ++b) {
                    if (acc[ocols[b]] == T{}) touched.push_back(ocols[b]);
                    acc[ocols[b]] += vals[a] * ovals[b];
                }
            }
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
            for (auto c : touched) {
                rows[i].emplace_back(c, acc[c]);
                acc[c] = T{};
            }
        }
        return from_rows(std::move(rows));
    }

    T trace() const {
        T t{};
        for (std::size_t i = 0; i < n_; ++i) t += at(i, i);
        return t;
    }

    std::vector<Triplet<T>> triplets() const {
        std::vector<Triplet<T>> out;
        for (std::size_t i = 0; i < n_; ++i) {
            auto cols = row_cols(i);
            auto vals = row_values(i);
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (cols[k] >= i) out.push_back({static_cast<std::uint32_t>(i), cols[k], vals[k]});
            }
        }
        return out;
    }

    bool is_symmetric() const {
        for (std::size_t i = 0; i < n_; ++i) {
            auto cols = row_cols(i);
            auto vals = row_values(i);
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (at(cols[k], i) != vals[k]) return false;
            }
        }
        return true;
    }

    // Mutable access for fault-injection checks; keeps the pattern fixed.
    void set_existing(std::size_t i, std::size_t j, T value) {
        auto cols = row_cols(i);
        auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(j));
        if (it == cols.end() || *it != j) throw std::out_of_range("entry not in sparsity pattern");
        vals_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())] = value;
    }

    friend bool operator==(const SparseSymMatrix& x, const SparseSymMatrix& y) {
        return x.n_ == y.n_ && x.row_ptr_ == y.row_ptr_ && x.cols_ == y.cols_ && x.vals_ == y.vals_;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> cols_;
    std::vector<T> vals_;
};

using CountMatrix = SparseSymMatrix<std::int64_t>;
using RealMatrix = SparseSymMatrix<double>;

}  // namespace hsbm

#endif  // HSBM_SPARSE_HPP
