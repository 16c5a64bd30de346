#include "mfgpdi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <umfpack.h>

#include "mfgpdi/errors.hpp"

namespace mfgpdi {

SparseMatrix::SparseMatrix(int nrows, int ncols, std::vector<int> row_offsets,
                           std::vector<int> col_indices, std::vector<double> values)
    : nrows_(nrows),
      ncols_(ncols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values))
{
    if (row_offsets_.size() != static_cast<std::size_t>(nrows_) + 1 ||
        col_indices_.size() != values_.size() ||
        static_cast<std::size_t>(row_offsets_.back()) != values_.size()) {
        throw InvalidArgument("SparseMatrix: inconsistent compressed-row arrays");
    }
}

SparseMatrix SparseMatrix::zero(int nrows, int ncols)
{
    return SparseMatrix(nrows, ncols, std::vector<int>(static_cast<std::size_t>(nrows) + 1, 0), {},
                        {});
}

SparseMatrix SparseMatrix::identity(int n)
{
    std::vector<int> offsets(static_cast<std::size_t>(n) + 1);
    std::iota(offsets.begin(), offsets.end(), 0);
    std::vector<int> cols(static_cast<std::size_t>(n));
    std::iota(cols.begin(), cols.end(), 0);
    return SparseMatrix(n, n, std::move(offsets), std::move(cols),
                        std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

double SparseMatrix::coeff(int row, int col) const
{
    if (row < 0 || row >= nrows_ || col < 0 || col >= ncols_) {
        throw InvalidArgument("SparseMatrix::coeff: index out of range");
    }
    const auto first = col_indices_.begin() + row_offsets_[static_cast<std::size_t>(row)];
    const auto last = col_indices_.begin() + row_offsets_[static_cast<std::size_t>(row) + 1];
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) {
        return 0.0;
    }
    return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

Vector SparseMatrix::matvec(const Vector& x) const
{
    if (x.size() != ncols_) {
        throw InvalidArgument("matvec: dimension mismatch");
    }
    Vector y = Vector::Zero(nrows_);
    for (int i = 0; i < nrows_; ++i) {
        double sum = 0.0;
        for (int k = row_offsets_[static_cast<std::size_t>(i)];
             k < row_offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
            sum += values_[static_cast<std::size_t>(k)] * x[col_indices_[static_cast<std::size_t>(k)]];
        }
        y[i] = sum;
    }
    return y;
}

SparseMatrix SparseMatrix::transpose() const
{
    std::vector<int> offsets(static_cast<std::size_t>(ncols_) + 1, 0);
    for (int c : col_indices_) {
        ++offsets[static_cast<std::size_t>(c) + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    std::vector<int> cols(values_.size());
    std::vector<double> vals(values_.size());
    std::vector<int> next(offsets.begin(), offsets.end() - 1);
    // Rows are visited in increasing order, so the transposed rows come out sorted.
    for (int i = 0; i < nrows_; ++i) {
        for (int k = row_offsets_[static_cast<std::size_t>(i)];
             k < row_offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
            const int c = col_indices_[static_cast<std::size_t>(k)];
            const auto dst = static_cast<std::size_t>(next[static_cast<std::size_t>(c)]++);
            cols[dst] = i;
            vals[dst] = values_[static_cast<std::size_t>(k)];
        }
    }
    return SparseMatrix(ncols_, nrows_, std::move(offsets), std::move(cols), std::move(vals));
}

double SparseMatrix::norm_inf() const
{
    double result = 0.0;
    for (int i = 0; i < nrows_; ++i) {
        double sum = 0.0;
        for (int k = row_offsets_[static_cast<std::size_t>(i)];
             k < row_offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
            sum += std::abs(values_[static_cast<std::size_t>(k)]);
        }
        result = std::max(result, sum);
    }
    return result;
}

Eigen::MatrixXd SparseMatrix::to_dense() const
{
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(nrows_, ncols_);
    for (int i = 0; i < nrows_; ++i) {
        for (int k = row_offsets_[static_cast<std::size_t>(i)];
             k < row_offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
            dense(i, col_indices_[static_cast<std::size_t>(k)]) += values_[static_cast<std::size_t>(k)];
        }
    }
    return dense;
}

SparseMatrix compress(const TripletBuffer& buffer)
{
    const int nrows = buffer.rows();
    const int ncols = buffer.cols();
    std::vector<Triplet> entries = buffer.entries();
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols) {
            throw InvalidArgument("compress: triplet index (" + std::to_string(t.row) + ", " +
                                  std::to_string(t.col) + ") out of range");
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        if (a.row != b.row) {
            return a.row < b.row;
        }
        if (a.col != b.col) {
            return a.col < b.col;
        }
        return a.value < b.value;
    });

    std::vector<int> offsets(static_cast<std::size_t>(nrows) + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size();) {
        const int row = entries[k].row;
        const int col = entries[k].col;
        double sum = 0.0;
        for (; k < entries.size() && entries[k].row == row && entries[k].col == col; ++k) {
            sum += entries[k].value;
        }
        cols.push_back(col);
        vals.push_back(sum);
        ++offsets[static_cast<std::size_t>(row) + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    return SparseMatrix(nrows, ncols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix linear_combination(double alpha, const SparseMatrix& a, double beta,
                                const SparseMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument("linear_combination: dimension mismatch");
    }
    std::vector<int> offsets(static_cast<std::size_t>(a.rows()) + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    cols.reserve(a.nonzeros() + b.nonzeros());
    vals.reserve(a.nonzeros() + b.nonzeros());
    const auto& ao = a.row_offsets();
    const auto& bo = b.row_offsets();
    const auto& ac = a.col_indices();
    const auto& bc = b.col_indices();
    const auto& av = a.values();
    const auto& bv = b.values();
    for (int i = 0; i < a.rows(); ++i) {
        auto ka = static_cast<std::size_t>(ao[static_cast<std::size_t>(i)]);
        auto kb = static_cast<std::size_t>(bo[static_cast<std::size_t>(i)]);
        const auto ea = static_cast<std::size_t>(ao[static_cast<std::size_t>(i) + 1]);
        const auto eb = static_cast<std::size_t>(bo[static_cast<std::size_t>(i) + 1]);
        while (ka < ea || kb < eb) {
            if (kb == eb || (ka < ea && ac[ka] < bc[kb])) {
                cols.push_back(ac[ka]);
                vals.push_back(alpha * av[ka]);
                ++ka;
            } else if (ka == ea || bc[kb] < ac[ka]) {
                cols.push_back(bc[kb]);
                vals.push_back(beta * bv[kb]);
                ++kb;
            } else {
                cols.push_back(ac[ka]);
                vals.push_back(alpha * av[ka] + beta * bv[kb]);
                ++ka;
                ++kb;
            }
        }
        offsets[static_cast<std::size_t>(i) + 1] = static_cast<int>(cols.size());
    }
    return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

// UMFPACK works on compressed columns. The CSR arrays of A are the CSC arrays
// of A^T, so the backend factors A^T and solves with the transposed system.
struct Factorization::Impl {
    std::vector<int> offsets;
    std::vector<int> indices;
    std::vector<double> values;
    void* numeric = nullptr;

    Impl() = default;
    Impl(const Impl&) = delete;
    Impl& operator=(const Impl&) = delete;
    ~Impl()
    {
        if (numeric != nullptr) {
            umfpack_di_free_numeric(&numeric);
        }
    }
};

Factorization::Factorization(int n, std::unique_ptr<Impl> impl) : n_(n), impl_(std::move(impl)) {}
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;
Factorization::~Factorization() = default;

namespace {

constexpr double kPivotRatio = 1e-14;

} // namespace

Factorization lu_factor(const SparseMatrix& a)
{
    if (a.rows() != a.cols()) {
        throw InvalidArgument("lu_factor: matrix must be square");
    }
    const int n = a.rows();
    auto impl = std::make_unique<Factorization::Impl>();
    if (n == 0) {
        return Factorization(0, std::move(impl));
    }
    impl->offsets = a.row_offsets();
    impl->indices = a.col_indices();
    impl->values = a.values();

    double control[UMFPACK_CONTROL];
    double info[UMFPACK_INFO];
    umfpack_di_defaults(control);

    void* symbolic = nullptr;
    int status = umfpack_di_symbolic(n, n, impl->offsets.data(), impl->indices.data(),
                                     impl->values.data(), &symbolic, control, info);
    if (status != UMFPACK_OK) {
        throw SingularMatrixError("lu_factor: symbolic analysis failed (UMFPACK status " +
                                  std::to_string(status) + ")");
    }
    status = umfpack_di_numeric(impl->offsets.data(), impl->indices.data(), impl->values.data(),
                                symbolic, &impl->numeric, control, info);
    umfpack_di_free_symbolic(&symbolic);
    if (status == UMFPACK_WARNING_singular_matrix) {
        throw SingularMatrixError("lu_factor: matrix is singular (zero pivot)");
    }
    if (status != UMFPACK_OK) {
        throw SingularMatrixError("lu_factor: numeric factorisation failed (UMFPACK status " +
                                  std::to_string(status) + ")");
    }
    // RCOND is min |u_ii| / max |u_ii| over the pivots of the factorisation.
    const double rcond = info[UMFPACK_RCOND];
    if (!(rcond >= kPivotRatio)) {
        throw SingularMatrixError("lu_factor: pivot ratio " + std::to_string(rcond) +
                                  " below 1e-14");
    }
    return Factorization(n, std::move(impl));
}

Vector solve(const Factorization& f, const Vector& b)
{
    if (b.size() != f.n_) {
        throw InvalidArgument("solve: right-hand side has size " + std::to_string(b.size()) +
                              ", expected " + std::to_string(f.n_));
    }
    Vector x = Vector::Zero(f.n_);
    if (f.n_ == 0) {
        return x;
    }
    double control[UMFPACK_CONTROL];
    double info[UMFPACK_INFO];
    umfpack_di_defaults(control);
    const auto& impl = *f.impl_;
    const int status = umfpack_di_solve(UMFPACK_At, impl.offsets.data(), impl.indices.data(),
                                        impl.values.data(), x.data(), b.data(), impl.numeric,
                                        control, info);
    if (status != UMFPACK_OK) {
        throw SingularMatrixError("solve: UMFPACK status " + std::to_string(status));
    }
    return x;
}

Vector solve(const SparseMatrix& a, const Vector& b)
{
    return solve(lu_factor(a), b);
}

} // namespace mfgpdi
