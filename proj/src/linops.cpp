#include "supertomo/linops.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "binary_io.hpp"
#include "supertomo/error.hpp"

namespace supertomo {

namespace {

constexpr std::string_view kCsrMagic = "SUPTOMO-CSR1";

void check_length(std::string_view op, std::size_t expected, std::size_t got) {
    if (expected != got) {
        throw Error(std::string(op) + ": dimension mismatch, operator expects " + std::to_string(expected) +
                    " but vector has " + std::to_string(got));
    }
}

}  // namespace

Image::Image(std::size_t rows, std::size_t cols, double fill) : rows(rows), cols(cols), data(rows * cols, fill) {}

Image::Image(std::size_t rows, std::size_t cols, Vector data) : rows(rows), cols(cols), data(std::move(data)) {
    if (this->data.size() != rows * cols) {
        throw Error("Image: data length " + std::to_string(this->data.size()) + " != rows*cols " +
                    std::to_string(rows * cols));
    }
}

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_ptr,
                           std::vector<std::size_t> col_idx, Vector values)
    : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
    if (row_ptr_.size() != n_rows_ + 1) throw Error("SparseMatrix: row_ptr must have n_rows+1 entries");
    if (row_ptr_.front() != 0) throw Error("SparseMatrix: row_ptr must start at 0");
    if (row_ptr_.back() != values_.size() || col_idx_.size() != values_.size()) {
        throw Error("SparseMatrix: row_ptr end, col_idx and values lengths disagree");
    }
    for (std::size_t r = 0; r < n_rows_; ++r) {
        if (row_ptr_[r] > row_ptr_[r + 1]) throw Error("SparseMatrix: row_ptr decreases at row " + std::to_string(r));
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            if (col_idx_[k] >= n_cols_) throw Error("SparseMatrix: column index out of range in row " + std::to_string(r));
            if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1]) {
                throw Error("SparseMatrix: column indices not strictly increasing in row " + std::to_string(r));
            }
        }
    }
}

SparseMatrix SparseMatrix::from_dense(std::size_t n_rows, std::size_t n_cols, std::span<const double> dense) {
    check_length("SparseMatrix::from_dense", n_rows * n_cols, dense.size());
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col_idx;
    Vector values;
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            const double v = dense[r * n_cols + c];
            if (v != 0.0) {
                col_idx.push_back(c);
                values.push_back(v);
            }
        }
        row_ptr.push_back(values.size());
    }
    return {n_rows, n_cols, std::move(row_ptr), std::move(col_idx), std::move(values)};
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<std::size_t> row_ptr(n + 1);
    std::vector<std::size_t> col_idx(n);
    for (std::size_t i = 0; i < n; ++i) {
        row_ptr[i + 1] = i + 1;
        col_idx[i] = i;
    }
    return {n, n, std::move(row_ptr), std::move(col_idx), Vector(n, 1.0)};
}

double SparseMatrix::row_dot(std::size_t row, std::span<const double> x) const {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
    return acc;
}

double SparseMatrix::row_norm2(std::size_t row) const {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k) acc += values_[k] * values_[k];
    return acc;
}

void SparseMatrix::add_scaled_row(std::size_t row, double scale, std::span<double> x) const {
    for (std::size_t k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k) x[col_idx_[k]] += scale * values_[k];
}

Vector SparseMatrix::to_dense() const {
    Vector dense(n_rows_ * n_cols_, 0.0);
    for (std::size_t r = 0; r < n_rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) dense[r * n_cols_ + col_idx_[k]] = values_[k];
    }
    return dense;
}

Vector matvec(const SparseMatrix& a, std::span<const double> x) {
    check_length("matvec", a.n_cols(), x.size());
    Vector out(a.n_rows());
    for (std::size_t r = 0; r < a.n_rows(); ++r) out[r] = a.row_dot(r, x);
    return out;
}

Vector rmatvec(const SparseMatrix& a, std::span<const double> y) {
    check_length("rmatvec", a.n_rows(), y.size());
    Vector out(a.n_cols(), 0.0);
    for (std::size_t r = 0; r < a.n_rows(); ++r) {
        if (y[r] != 0.0) a.add_scaled_row(r, y[r], out);
    }
    return out;
}

Vector normal_op(const SparseMatrix& a, std::span<const double> x) { return rmatvec(a, matvec(a, x)); }

double dot(std::span<const double> a, std::span<const double> b) {
    check_length("dot", a.size(), b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) { return dot(a, a); }

double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    check_length("axpy", y.size(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector add(std::span<const double> a, std::span<const double> b) {
    check_length("add", a.size(), b.size());
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
    check_length("subtract", a.size(), b.size());
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vector scaled(double alpha, std::span<const double> a) {
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i];
    return out;
}

void save_matrix(const SparseMatrix& a, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    detail::write_magic(os, kCsrMagic);
    detail::write_u64(os, a.n_rows());
    detail::write_u64(os, a.n_cols());
    detail::write_u64(os, a.nnz());
    for (auto v : a.row_ptr()) detail::write_u64(os, v);
    for (auto v : a.col_idx()) detail::write_u64(os, v);
    for (auto v : a.values()) detail::write_f64(os, v);
    if (!os) throw Error("write failed: " + path.string());
}

SparseMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    detail::expect_magic(is, kCsrMagic);
    const auto n_rows = detail::read_u64(is, "n_rows");
    const auto n_cols = detail::read_u64(is, "n_cols");
    const auto nnz = detail::read_u64(is, "nnz");
    std::vector<std::size_t> row_ptr(n_rows + 1);
    for (auto& v : row_ptr) v = detail::read_u64(is, "row_ptr");
    std::vector<std::size_t> col_idx(nnz);
    for (auto& v : col_idx) v = detail::read_u64(is, "col_idx");
    Vector values(nnz);
    for (auto& v : values) v = detail::read_f64(is, "values");
    return {n_rows, n_cols, std::move(row_ptr), std::move(col_idx), std::move(values)};
}

}  // namespace supertomo
