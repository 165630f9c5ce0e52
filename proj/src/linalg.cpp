#include "peterlin/linalg.hpp"

#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace peterlin {

SparseMatrix SparseMatrix::from_csr(int rows, int cols, std::vector<int> offsets, std::vector<int> col_indices,
                                    std::vector<double> values) {
    if (static_cast<int>(offsets.size()) != rows + 1 || offsets.front() != 0 ||
        offsets.back() != static_cast<int>(values.size()) || col_indices.size() != values.size())
        throw std::invalid_argument("from_csr: inconsistent array sizes");
    for (int r = 0; r < rows; ++r)
        for (int k = offsets[r]; k < offsets[r + 1]; ++k) {
            if (col_indices[k] < 0 || col_indices[k] >= cols)
                throw std::invalid_argument("from_csr: column index out of range");
            if (k > offsets[r] && col_indices[k] <= col_indices[k - 1])
                throw std::invalid_argument("from_csr: columns not strictly increasing");
        }
    SparseMatrix m;
    m.nrows_ = rows;
    m.ncols_ = cols;
    m.offsets_ = std::move(offsets);
    m.cols_ = std::move(col_indices);
    m.vals_ = std::move(values);
    return m;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(nrows_, 0.0);
    multiply_add(x, 1.0, y);
    return y;
}

void SparseMatrix::multiply_add(std::span<const double> x, double s, std::span<double> y) const {
    for (int r = 0; r < nrows_; ++r) {
        double acc = 0.0;
        for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) acc += vals_[k] * x[cols_[k]];
        y[r] += s * acc;
    }
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : vals_) m = std::max(m, std::abs(v));
    return m;
}

SparseMatrix CooBuilder::finalize() const {
    const std::size_t n = vals_.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        if (rows_[a] != rows_[b]) return rows_[a] < rows_[b];
        return cols_[a] < cols_[b];
    });

    SparseMatrix m;
    m.nrows_ = nrows_;
    m.ncols_ = ncols_;
    m.offsets_.assign(nrows_ + 1, 0);
    m.cols_.reserve(n);
    m.vals_.reserve(n);
    int prev_row = -1, prev_col = -1;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        if (rows_[i] == prev_row && cols_[i] == prev_col) {
            m.vals_.back() += vals_[i];
        } else {
            m.cols_.push_back(cols_[i]);
            m.vals_.push_back(vals_[i]);
            m.offsets_[rows_[i] + 1] += 1;
            prev_row = rows_[i];
            prev_col = cols_[i];
        }
    }
    for (int r = 0; r < nrows_; ++r) m.offsets_[r + 1] += m.offsets_[r];
    return m;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

namespace {

using EigenCsc = Eigen::SparseMatrix<double, Eigen::ColMajor>;

EigenCsc to_eigen(const SparseMatrix& a) {
    Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor>> view(
        a.rows(), a.cols(), a.nnz(), a.row_offsets().data(), a.col_indices().data(), a.values().data());
    return EigenCsc(view);
}

// Threaded BLAS thrashes on the small frontal blocks of 2D factorizations;
// pin it before the first factorization unless the user chose otherwise.
const bool kBlasThreadsPinned = [] {
    setenv("OPENBLAS_NUM_THREADS", "1", /*overwrite=*/0);
    return true;
}();

}  // namespace

struct SparseLu::Impl {
    Eigen::UmfPackLU<EigenCsc> lu;
    EigenCsc mat;
    bool analyzed = false;
    std::vector<int> pattern_offsets;
    std::vector<int> pattern_cols;
};

SparseLu::SparseLu() : impl_(std::make_unique<Impl>()) {
    (void)kBlasThreadsPinned;
    // nested dissection keeps the fill of the coupled 2D systems in check
    impl_->lu.umfpackControl()[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
}
SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

void SparseLu::factorize(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("solve: matrix must be square");
    impl_->mat = to_eigen(a);
    const bool same_pattern =
        impl_->analyzed &&
        std::equal(impl_->pattern_offsets.begin(), impl_->pattern_offsets.end(), a.row_offsets().begin(),
                   a.row_offsets().end()) &&
        std::equal(impl_->pattern_cols.begin(), impl_->pattern_cols.end(), a.col_indices().begin(),
                   a.col_indices().end());
    if (!same_pattern) {
        impl_->lu.analyzePattern(impl_->mat);
        impl_->pattern_offsets.assign(a.row_offsets().begin(), a.row_offsets().end());
        impl_->pattern_cols.assign(a.col_indices().begin(), a.col_indices().end());
        impl_->analyzed = true;
    }
    impl_->lu.factorize(impl_->mat);
    if (impl_->lu.info() != Eigen::Success)
        throw SolveError("sparse LU factorization failed (singular to working precision)",
                         std::numeric_limits<double>::infinity());
}

std::vector<double> SparseLu::solve(const SparseMatrix& a, std::span<const double> b) const {
    if (a.rows() != static_cast<int>(b.size())) throw std::invalid_argument("solve: size mismatch");
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), b.size());
    Eigen::VectorXd x = impl_->lu.solve(bv);

    auto residual_norm = [&](const Eigen::VectorXd& xv) {
        return (impl_->mat * xv - bv).norm();
    };
    const double tol = 1e-10 * (1.0 + bv.norm());
    double res = residual_norm(x);
    if (res > tol) {
        // one step of iterative refinement before giving up
        Eigen::VectorXd r = bv - impl_->mat * x;
        x += impl_->lu.solve(r);
        res = residual_norm(x);
        if (res > tol)
            throw SolveError("sparse solve missed residual tolerance (achieved " + std::to_string(res) + ")",
                             res);
    }
    return std::vector<double>(x.data(), x.data() + x.size());
}

std::vector<double> solve(const SparseMatrix& a, std::span<const double> b) {
    SparseLu lu;
    lu.factorize(a);
    return lu.solve(a, b);
}

}  // namespace peterlin
