#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "mfgpdi/types.hpp"

namespace mfgpdi {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Unordered (row, col, value) entries; duplicates are summed by compress().
class TripletBuffer {
public:
    TripletBuffer(int nrows, int ncols) : nrows_(nrows), ncols_(ncols) {}

    void add(int row, int col, double value) { entries_.push_back({row, col, value}); }
    void reserve(std::size_t n) { entries_.reserve(n); }

    [[nodiscard]] int rows() const { return nrows_; }
    [[nodiscard]] int cols() const { return ncols_; }
    [[nodiscard]] const std::vector<Triplet>& entries() const { return entries_; }

private:
    int nrows_;
    int ncols_;
    std::vector<Triplet> entries_;
};

/// Compressed-row sparse matrix. Column indices are sorted and unique in each row.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int nrows, int ncols, std::vector<int> row_offsets, std::vector<int> col_indices,
                 std::vector<double> values);

    /// Zero matrix with empty rows.
    static SparseMatrix zero(int nrows, int ncols);
    static SparseMatrix identity(int n);

    [[nodiscard]] int rows() const { return nrows_; }
    [[nodiscard]] int cols() const { return ncols_; }
    [[nodiscard]] std::size_t nonzeros() const { return values_.size(); }

    [[nodiscard]] const std::vector<int>& row_offsets() const { return row_offsets_; }
    [[nodiscard]] const std::vector<int>& col_indices() const { return col_indices_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }

    /// Stored value at (row, col), zero when the entry is not in the pattern.
    [[nodiscard]] double coeff(int row, int col) const;

    [[nodiscard]] Vector matvec(const Vector& x) const;
    [[nodiscard]] SparseMatrix transpose() const;
    /// max_i sum_j |a_ij|
    [[nodiscard]] double norm_inf() const;
    [[nodiscard]] Eigen::MatrixXd to_dense() const;

private:
    int nrows_ = 0;
    int ncols_ = 0;
    std::vector<int> row_offsets_{0};
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

/// Sums duplicates in a canonical order, so the result is bitwise independent
/// of the order in which entries were added.
[[nodiscard]] SparseMatrix compress(const TripletBuffer& buffer);

/// alpha * A + beta * B
[[nodiscard]] SparseMatrix linear_combination(double alpha, const SparseMatrix& a, double beta,
                                              const SparseMatrix& b);

/// LU factorisation with partial pivoting of a square sparse matrix.
///
/// Holds an opaque handle to the sparse direct backend; immutable after
/// construction, so repeated solve() calls are safe.
class Factorization {
public:
    Factorization(Factorization&&) noexcept;
    Factorization& operator=(Factorization&&) noexcept;
    ~Factorization();

    [[nodiscard]] int size() const { return n_; }

private:
    friend Factorization lu_factor(const SparseMatrix& a);
    friend Vector solve(const Factorization& f, const Vector& b);
    struct Impl;
    Factorization(int n, std::unique_ptr<Impl> impl);
    int n_;
    std::unique_ptr<Impl> impl_;
};

/// Throws SingularMatrixError when the smallest pivot falls below 1e-14 times
/// the largest one.
[[nodiscard]] Factorization lu_factor(const SparseMatrix& a);

[[nodiscard]] Vector solve(const Factorization& f, const Vector& b);

/// Factor and solve in one call.
[[nodiscard]] Vector solve(const SparseMatrix& a, const Vector& b);

} // namespace mfgpdi
