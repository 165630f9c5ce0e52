#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace peterlin {

/// General sparse real matrix in compressed-row form. Column indices are
/// strictly increasing within each row and duplicates are summed away at
/// construction. Immutable.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Adopts ready-made CSR arrays; validates ordering and ranges.
    static SparseMatrix from_csr(int rows, int cols, std::vector<int> offsets, std::vector<int> col_indices,
                                 std::vector<double> values);

    int rows() const { return nrows_; }
    int cols() const { return ncols_; }
    int nnz() const { return static_cast<int>(vals_.size()); }

    std::span<const int> row_offsets() const { return offsets_; }
    std::span<const int> col_indices() const { return cols_; }
    std::span<const double> values() const { return vals_; }

    std::vector<double> multiply(std::span<const double> x) const;

    /// y += s * (A x)
    void multiply_add(std::span<const double> x, double s, std::span<double> y) const;

    double max_abs() const;

private:
    friend class CooBuilder;
    int nrows_ = 0, ncols_ = 0;
    std::vector<int> offsets_{0};
    std::vector<int> cols_;
    std::vector<double> vals_;
};

/// Triplet accumulator; finalize() sums duplicates and emits sorted CSR.
class CooBuilder {
public:
    CooBuilder(int rows, int cols) : nrows_(rows), ncols_(cols) {}

    void add(int r, int c, double v) {
        if (r < 0 || r >= nrows_ || c < 0 || c >= ncols_)
            throw std::out_of_range("CooBuilder::add: index out of range");
        rows_.push_back(r);
        cols_.push_back(c);
        vals_.push_back(v);
    }

    int rows() const { return nrows_; }
    int cols() const { return ncols_; }
    std::size_t triplet_count() const { return vals_.size(); }
    void reserve(std::size_t n) { rows_.reserve(n); cols_.reserve(n); vals_.reserve(n); }

    SparseMatrix finalize() const;

private:
    int nrows_, ncols_;
    std::vector<int> rows_, cols_;
    std::vector<double> vals_;
};

/// Thrown when the direct solve cannot meet its residual contract.
struct SolveError : std::runtime_error {
    SolveError(const std::string& what, double res) : std::runtime_error(what), residual(res) {}
    double residual;
};

/// Sparse LU with partial pivoting. The assembled systems are indefinite
/// saddle-point matrices, so nothing here assumes definiteness. The symbolic
/// analysis can be reused across solves with an identical sparsity pattern.
class SparseLu {
public:
    SparseLu();
    ~SparseLu();
    SparseLu(SparseLu&&) noexcept;
    SparseLu& operator=(SparseLu&&) noexcept;

    void factorize(const SparseMatrix& a);  // reuses the pattern analysis when unchanged

    /// Solution with one step of iterative refinement; throws SolveError if
    /// ||Ax-b||_2 > 1e-10 * (1 + ||b||_2).
    std::vector<double> solve(const SparseMatrix& a, std::span<const double> b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience around SparseLu.
std::vector<double> solve(const SparseMatrix& a, std::span<const double> b);

double norm2(std::span<const double> v);

}  // namespace peterlin
