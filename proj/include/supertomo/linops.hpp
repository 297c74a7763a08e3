#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace supertomo {

using Vector = std::vector<double>;

/// A 2-D image stored row-major: pixel (i, j), 0-based, lives at data[i * cols + j].
struct Image {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vector data;

    Image() = default;
    Image(std::size_t rows, std::size_t cols, double fill = 0.0);
    Image(std::size_t rows, std::size_t cols, Vector data);

    [[nodiscard]] std::size_t size() const { return data.size(); }
    [[nodiscard]] double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    bool operator==(const Image&) const = default;
};

/// Compressed sparse row matrix. Immutable once constructed; column indices are
/// strictly increasing within each row.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_ptr,
                 std::vector<std::size_t> col_idx, Vector values);

    /// Builds from a dense row-major array, dropping exact zeros.
    static SparseMatrix from_dense(std::size_t n_rows, std::size_t n_cols, std::span<const double> dense);
    static SparseMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t n_rows() const { return n_rows_; }
    [[nodiscard]] std::size_t n_cols() const { return n_cols_; }
    [[nodiscard]] std::size_t nnz() const { return values_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    [[nodiscard]] const std::vector<std::size_t>& col_idx() const { return col_idx_; }
    [[nodiscard]] const Vector& values() const { return values_; }

    [[nodiscard]] double row_dot(std::size_t row, std::span<const double> x) const;
    [[nodiscard]] double row_norm2(std::size_t row) const;
    /// x += scale * row
    void add_scaled_row(std::size_t row, double scale, std::span<double> x) const;

    [[nodiscard]] Vector to_dense() const;

    bool operator==(const SparseMatrix&) const = default;

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    Vector values_;
};

[[nodiscard]] Vector matvec(const SparseMatrix& a, std::span<const double> x);
[[nodiscard]] Vector rmatvec(const SparseMatrix& a, std::span<const double> y);
/// A^T (A x), the Gram (normal-equations) operator.
[[nodiscard]] Vector normal_op(const SparseMatrix& a, std::span<const double> x);

[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double norm2(std::span<const double> a);
[[nodiscard]] double norm(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
[[nodiscard]] Vector add(std::span<const double> a, std::span<const double> b);
[[nodiscard]] Vector subtract(std::span<const double> a, std::span<const double> b);
[[nodiscard]] Vector scaled(double alpha, std::span<const double> a);

/// Binary container "SUPTOMO-CSR1": magic, u64 n_rows, n_cols, nnz, u64 row_ptr[n_rows+1],
/// u64 col_idx[nnz], f64 values[nnz]; all little-endian.
void save_matrix(const SparseMatrix& a, const std::filesystem::path& path);
[[nodiscard]] SparseMatrix load_matrix(const std::filesystem::path& path);

}  // namespace supertomo
